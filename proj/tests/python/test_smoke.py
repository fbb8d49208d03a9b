import json
import os
import threading

import pytest

import taskcl

CORPUS = os.environ.get("TASKCL_CORPUS", os.path.join(os.path.dirname(__file__), "..", "..", "corpus"))
FACT_QUERY = "forall Y. exists Z. fact(Y,Z)"


def read(name):
    with open(os.path.join(CORPUS, name)) as f:
        return f.read()


def test_parse_and_print():
    agents = taskcl.parse_program(read("lottery.taskcl"))
    assert agents == [("t", "0 + 1000000")]
    assert taskcl.parse_query("p(a)  *  q") == "p(a) * q"
    with pytest.raises(taskcl.ParseError):
        taskcl.parse_program("a: p(X.")
    with pytest.raises(taskcl.TaskclError):
        taskcl.parse_query("p +")


def test_normalize():
    assert taskcl.normalize("(\\x. f x x) a") == "f(a, a)"
    assert taskcl.normalize("(\\x. \\y. x) y") == "\\y1. y"


def test_unify():
    assert taskcl.unify("f X b", "f a Y") == {"X": "a", "Y": "b"}
    assert taskcl.unify("f X", "g X") is None
    assert taskcl.unify("X", "f X") is None
    assert taskcl.unify("\\x. F x", "\\x. g x x") == {"F": "\\z. g(z, z)"}
    with pytest.raises(ValueError):
        taskcl.unify("F a", "b")


def test_solve_factorial():
    t = taskcl.solve(read("factorial.taskcl"), FACT_QUERY, ["5"])
    assert t["outcome"] == "success"
    assert t["bindings"] == {"Z": "120"}
    assert t["moves"][0] == {"who": "env", "site": "goal/call", "move": "witness 5"}


def test_solve_lottery_and_budget():
    t = taskcl.solve(read("lottery.taskcl"), "0 + 1000000", [1])
    assert [m["move"] for m in t["moves"]] == ["pick 1", "pick 1"]
    with pytest.raises(taskcl.EnvExhausted):
        taskcl.solve(read("lottery.taskcl"), "0 + 1000000")
    with pytest.raises(taskcl.OutOfRange):
        taskcl.solve(read("lottery.taskcl"), "0 + 1000000", [3])
    t = taskcl.solve(read("factorial.taskcl"), "fact(5, Z)", max_steps=3)
    assert t["outcome"] == "budget exhausted"


def test_verify():
    r = taskcl.verify(read("lottery.taskcl"), "0 + 1000000")
    assert r["winnable"] and r["plays"] == 2 and r["losing_play"] is None
    r = taskcl.verify(read("fastfood.taskcl"),
                      "forall X. (geq(X,3) -> m(ham) * m(coke) * m(X-3))", {"X": ["5", "2"]})
    assert not r["winnable"]
    assert r["losing_play"]["moves"][0]["move"] == "witness 2"


def test_sessions():
    s = taskcl.Sessions()
    sid, state = s.create(read("factorial.taskcl"), FACT_QUERY)
    assert state["status"] == "awaiting_env"
    assert state["pending"]["binder"] == "Y"
    with pytest.raises(taskcl.BadTerm):
        s.submit(sid, term="X")
    state = s.submit(sid, term="4", expected_site="goal/call")
    assert state["bindings"] == {"Z": "24"}
    with pytest.raises(taskcl.IllegalState):
        s.submit(sid, term="4")
    assert len(s) == 1
    s.close(sid)
    with pytest.raises(taskcl.UnknownSession):
        s.get(sid)


def test_sessions_in_threads():
    s = taskcl.Sessions()
    results = {}

    def work(n):
        sid, _ = s.create(read("factorial.taskcl"), FACT_QUERY)
        results[n] = s.submit(sid, term=str(n))["bindings"]["Z"]

    threads = [threading.Thread(target=work, args=(n,)) for n in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == {0: "1", 1: "1", 2: "2", 3: "6", 4: "24", 5: "120"}


def test_protocol():
    s = taskcl.Sessions()
    status, body = taskcl.handle_request(
        s, "POST", "/sessions", json.dumps({"program": read("lottery.taskcl"), "query": "0 + 1000000"}))
    assert status == 201
    sid = json.loads(body)["id"]
    status, body = taskcl.handle_request(s, "POST", f"/sessions/{sid}/moves", '{"pick": 7}')
    assert status == 422 and json.loads(body)["error"] == "OutOfRange"
    assert taskcl.handle_request(s, "DELETE", f"/sessions/{sid}")[0] == 204
