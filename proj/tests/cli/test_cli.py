"""End-to-end checks of the taskcl command line."""

import json
import os
import socket
import subprocess
import sys
import tempfile
import time
import unittest
import urllib.request

BIN = os.environ["TASKCL_BIN"]
CORPUS = os.environ["TASKCL_CORPUS"]
FACT_QUERY = "forall Y. exists Z. fact(Y,Z)"
FASTFOOD_QUERY = "forall X. (geq(X,3) -> m(ham) * m(coke) * m(X-3))"


def corpus(*parts):
    return os.path.join(CORPUS, *parts)


def taskcl(*args, stdin=""):
    return subprocess.run([BIN, *args], input=stdin, capture_output=True, text=True, timeout=60)


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class Run(unittest.TestCase):
    def test_factorial(self):
        r = taskcl("run", corpus("factorial.taskcl"), "-q", FACT_QUERY,
                   "--moves", corpus("moves", "y5.json"))
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(r.stdout, "success\nZ = 120\n")

    def test_trace(self):
        r = taskcl("run", corpus("lottery.taskcl"), "-q", "0 + 1000000",
                   "--moves", corpus("moves", "pick1.json"), "--trace")
        self.assertEqual(r.returncode, 0)
        self.assertEqual(r.stdout.splitlines(), [
            "1. env @ res[0]/cor: pick 1",
            "2. machine @ goal/cor: pick 1",
            "   uses res[0]/1: 1000000",
            "success",
        ])

    def test_failure(self):
        r = taskcl("run", corpus("fastfood.taskcl"), "-q", FASTFOOD_QUERY,
                   "--moves", corpus("moves", "pay2.json"))
        self.assertEqual(r.returncode, 1)
        self.assertEqual(r.stdout, "failure\n")

    def test_budget(self):
        r = taskcl("run", corpus("factorial.taskcl"), "-q", "fact(5, Z)", "--max-steps", "3")
        self.assertEqual(r.returncode, 2)
        self.assertEqual(r.stdout, "budget exhausted\n")

    def test_parse_error(self):
        with tempfile.NamedTemporaryFile("w", suffix=".taskcl", delete=False) as f:
            f.write("a: p(X.\n")
        try:
            r = taskcl("run", f.name, "-q", "p")
        finally:
            os.unlink(f.name)
        self.assertEqual(r.returncode, 3)
        self.assertIn("1:", r.stderr)

    def test_bad_query_and_missing_file(self):
        self.assertEqual(taskcl("run", corpus("lottery.taskcl"), "-q", "0 +").returncode, 3)
        self.assertEqual(taskcl("run", corpus("nope.taskcl"), "-q", "p").returncode, 3)

    def test_polarity_error(self):
        r = taskcl("run", corpus("lottery.taskcl"), "-q", "!p")
        self.assertEqual(r.returncode, 3)
        self.assertIn("polarity", r.stderr)

    def test_environment_needed(self):
        r = taskcl("run", corpus("lottery.taskcl"), "-q", "0 + 1000000")
        self.assertEqual(r.returncode, 4)
        self.assertIn("res[0]/cor", r.stderr)

    def test_script_out_of_range(self):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            json.dump({"moves": [{"pick": 7}]}, f)
        try:
            r = taskcl("run", corpus("lottery.taskcl"), "-q", "0 + 1000000", "--moves", f.name)
        finally:
            os.unlink(f.name)
        self.assertEqual(r.returncode, 4)


class Verify(unittest.TestCase):
    def test_lottery(self):
        r = taskcl("verify", corpus("lottery.taskcl"), "-q", "0 + 1000000")
        self.assertEqual(r.returncode, 0)
        self.assertEqual(r.stdout, "winnable (2 plays)\n")

    def test_factorial_domains(self):
        r = taskcl("verify", corpus("factorial.taskcl"), "-q", FACT_QUERY,
                   "--domains", corpus("domains", "factorial.json"))
        self.assertEqual(r.returncode, 0)
        self.assertEqual(r.stdout, "winnable (6 plays)\n")

    def test_counterexample(self):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            json.dump({"X": [5, 2]}, f)
        try:
            r = taskcl("verify", corpus("fastfood.taskcl"), "-q", FASTFOOD_QUERY, "--domains", f.name)
        finally:
            os.unlink(f.name)
        self.assertEqual(r.returncode, 1)
        lines = r.stdout.splitlines()
        self.assertEqual(lines[0], "not winnable (2 plays)")
        self.assertIn("env @ goal/call: witness 2", r.stdout)

    def test_missing_domain(self):
        r = taskcl("verify", corpus("factorial.taskcl"), "-q", FACT_QUERY)
        self.assertEqual(r.returncode, 4)


class Repl(unittest.TestCase):
    def test_session(self):
        r = taskcl("repl", corpus("factorial.taskcl"),
                   stdin=f"{FACT_QUERY}\nf(\n4\n:trace on\nfact(0, Z)\nfact(\n:quit\n")
        self.assertEqual(r.returncode, 0)
        out = r.stdout
        self.assertIn("env @ goal/call: term for Y", out)
        self.assertEqual(out.count("term for Y"), 2)
        self.assertIn("Z = 24", out)
        self.assertIn("Z = 1", out)
        self.assertIn("error:", out)

    def test_choices(self):
        r = taskcl("repl", corpus("lottery.taskcl"), stdin="0 + 1000000\n9\n1\n")
        self.assertEqual(r.returncode, 0)
        self.assertIn("1) 1000000", r.stdout)
        self.assertIn("enter a number from 0 to 1", r.stdout)
        self.assertIn("success", r.stdout)

    def test_same_transcript_as_batch(self):
        batch = taskcl("run", corpus("lottery.taskcl"), "-q", "0 + 1000000",
                       "--moves", corpus("moves", "pick1.json"), "--trace").stdout.splitlines()
        r = taskcl("repl", corpus("lottery.taskcl"), stdin=":trace on\n0 + 1000000\n1\n")
        lines = [line.removeprefix("?- ").removeprefix("> ") for line in r.stdout.splitlines()]
        start = lines.index(batch[0])
        self.assertEqual(lines[start:start + len(batch)], batch)


class Serve(unittest.TestCase):
    def start(self, port, *extra):
        p = subprocess.Popen([BIN, "serve", "--port", str(port), *extra], stdout=subprocess.PIPE,
                             stderr=subprocess.PIPE, text=True)
        self.addCleanup(lambda: (p.kill(), p.wait()))
        return p

    def test_sessions_over_http(self):
        port = free_port()
        p = self.start(port)
        self.assertIn(f":{port}", p.stdout.readline())
        base = f"http://127.0.0.1:{port}"
        with open(corpus("lottery.taskcl")) as f:
            body = json.dumps({"program": f.read(), "query": "0 + 1000000"}).encode()
        req = urllib.request.Request(base + "/sessions", data=body, method="POST",
                                     headers={"Content-Type": "application/json"})
        with urllib.request.urlopen(req) as resp:
            self.assertEqual(resp.status, 201)
            created = json.load(resp)
        self.assertEqual(created["state"]["pending"]["site"], "res[0]/cor")
        req = urllib.request.Request(f"{base}/sessions/{created['id']}/moves",
                                     data=b'{"pick": 0}', method="POST")
        with urllib.request.urlopen(req) as resp:
            self.assertEqual(json.load(resp)["state"]["status"], "succeeded")

        second = subprocess.run([BIN, "serve", "--port", str(port)], capture_output=True,
                                text=True, timeout=10)
        self.assertEqual(second.returncode, 1)
        self.assertIn("cannot listen", second.stderr)

    def test_static_assets(self):
        with tempfile.TemporaryDirectory() as d:
            with open(os.path.join(d, "index.html"), "w") as f:
                f.write("<p>console</p>")
            port = free_port()
            p = self.start(port, "--static", d)
            p.stdout.readline()
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/index.html") as resp:
                self.assertEqual(resp.read(), b"<p>console</p>")

    def test_static_dir_missing(self):
        r = taskcl("serve", "--port", "0", "--static", "/nonexistent/dir")
        self.assertEqual(r.returncode, 1)


if __name__ == "__main__":
    unittest.main(verbosity=2)
