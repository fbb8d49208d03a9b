// Python bindings: strings in, strings and dicts out.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "taskcl/engine.hpp"
#include "taskcl/errors.hpp"
#include "taskcl/protocol.hpp"
#include "taskcl/session.hpp"
#include "taskcl/syntax.hpp"
#include "taskcl/unify.hpp"

namespace py = pybind11;
using namespace taskcl;

namespace {

Limits limits_of(std::uint64_t max_steps) {
  if (max_steps == 0) throw py::value_error("max_steps must be positive");
  Limits l;
  l.max_steps = max_steps;
  return l;
}

py::object from_json(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

// Free variables of a parsed term come back as constants; turn them into metas.
Term with_metas(const Term& t, const std::map<std::string, Term>& metas) {
  switch (t.kind()) {
    case TermKind::Const: {
      auto it = metas.find(t.name());
      return it == metas.end() ? t : it->second;
    }
    case TermKind::App:
      return Term::app(with_metas(t.fun(), metas), with_metas(t.arg(), metas));
    case TermKind::Lam:
      return Term::lam(t.name(), with_metas(t.body(), metas));
    default:
      return t;
  }
}

py::dict transcript_dict(const Transcript& t) {
  py::list moves;
  for (const Move& m : t.moves) {
    py::dict d;
    d["who"] = m.chooser == Chooser::Machine ? "machine" : "env";
    d["site"] = m.site;
    d["move"] = describe(m);
    moves.append(d);
  }
  py::list consumed;
  for (const Consumption& c : t.consumed) {
    py::dict d;
    d["site"] = c.site;
    d["atom"] = c.atom.is_null() ? std::string() : pretty(c.atom);
    d["rewrite"] = c.kind == Consumption::Kind::Rewrite;
    consumed.append(d);
  }
  py::dict bindings;
  for (const auto& [name, value] : t.bindings) bindings[py::str(name)] = pretty(value);
  py::dict out;
  out["outcome"] = to_string(t.outcome);
  out["moves"] = moves;
  out["consumed"] = consumed;
  out["bindings"] = bindings;
  out["diagnostics"] = t.diagnostics;
  out["steps"] = t.steps;
  return out;
}

MoveScript script_of(const std::vector<std::variant<int, std::string>>& moves) {
  MoveScript s;
  for (const auto& m : moves) {
    MoveEntry e;
    if (const int* i = std::get_if<int>(&m))
      e.payload = MoveEntry::Pick{*i};
    else
      e.payload = MoveEntry::TermText{std::get<std::string>(m)};
    s.entries.push_back(std::move(e));
  }
  return s;
}

}  // namespace

PYBIND11_MODULE(_taskcl, m) {
  m.doc() = "Task-oriented computability logic interpreter";

  auto base = py::register_exception<Error>(m, "TaskclError");
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<PolarityError>(m, "PolarityError", base);
  py::register_exception<EnvExhausted>(m, "EnvExhausted", base);
  py::register_exception<OutOfRange>(m, "OutOfRange", base);
  py::register_exception<BadTerm>(m, "BadTerm", base);
  py::register_exception<ScriptMismatch>(m, "ScriptMismatch", base);
  py::register_exception<DomainMissing>(m, "DomainMissing", base);
  py::register_exception<UnknownSession>(m, "UnknownSession", base);
  py::register_exception<IllegalState>(m, "IllegalState", base);

  m.def(
      "parse_program",
      [](const std::string& text) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const AgentDecl& d : parse_program(text)) out.emplace_back(d.name, pretty(d.formula));
        return out;
      },
      py::arg("text"), "Agents of a program as (name, formula) pairs in canonical form.");
  m.def(
      "parse_query", [](const std::string& text) { return pretty(parse_query(text)); },
      py::arg("text"), "Canonical form of a query.");
  m.def(
      "normalize",
      [](const std::string& text, std::uint64_t fuel) {
        return pretty(beta_normalize(parse_term(text), fuel));
      },
      py::arg("term"), py::arg("fuel") = kDefaultTermFuel, "Beta-normal form of a term.");
  m.def(
      "unify",
      [](const std::string& a, const std::string& b) -> py::object {
        std::vector<std::string> free_a, free_b;
        Term ta = parse_term(a, &free_a);
        Term tb = parse_term(b, &free_b);
        std::map<std::string, Term> metas;
        MetaId next = 1;
        for (const auto* names : {&free_a, &free_b})
          for (const std::string& n : *names)
            if (!metas.count(n)) metas.emplace(n, Term::meta(n, next++));
        UnifyResult r = unify(beta_normalize(with_metas(ta, metas)),
                              beta_normalize(with_metas(tb, metas)));
        if (r.status == UnifyStatus::Failure) return py::none();
        if (r.status == UnifyStatus::NonPattern)
          throw py::value_error("not a higher-order pattern problem");
        py::dict out;
        for (const auto& [name, meta] : metas)
          if (const Term* v = r.sigma.find(meta.meta_id())) out[py::str(name)] = pretty(*v);
        return out;
      },
      py::arg("a"), py::arg("b"),
      "Most general unifier of two terms as {variable: term}, or None.");
  m.def(
      "solve",
      [](const std::string& program, const std::string& query,
         const std::vector<std::variant<int, std::string>>& moves, std::uint64_t max_steps) {
        auto decls = parse_program(program);
        Formula q = parse_query(query);
        ScriptedEnv env(script_of(moves));
        Transcript t;
        {
          py::gil_scoped_release release;
          t = solve(decls, q, env, limits_of(max_steps));
        }
        return transcript_dict(t);
      },
      py::arg("program"), py::arg("query"), py::arg("moves") = std::vector<std::variant<int, std::string>>{},
      py::arg("max_steps") = 100000,
      "Plays a query; environment moves are branch indices or witness term texts.");
  m.def(
      "verify",
      [](const std::string& program, const std::string& query,
         const std::map<std::string, std::vector<std::string>>& domains, std::uint64_t max_steps) {
        auto decls = parse_program(program);
        Formula q = parse_query(query);
        EnvDomains d;
        for (const auto& [key, terms] : domains)
          for (const std::string& t : terms) d[key].push_back(parse_closed_term(t));
        WinReport r;
        {
          py::gil_scoped_release release;
          r = verify_winnable(decls, q, d, limits_of(max_steps));
        }
        py::dict out;
        out["winnable"] = r.winnable;
        out["plays"] = r.plays;
        out["losing_play"] = r.losing_play ? py::object(transcript_dict(*r.losing_play)) : py::none();
        return out;
      },
      py::arg("program"), py::arg("query"),
      py::arg("domains") = std::map<std::string, std::vector<std::string>>{},
      py::arg("max_steps") = 100000, "Plays every environment strategy over the given domains.");

  py::class_<SessionManager>(m, "Sessions")
      .def(py::init([](double ttl_seconds) {
             return std::make_unique<SessionManager>(
                 std::chrono::seconds(static_cast<std::int64_t>(ttl_seconds)));
           }),
           py::arg("ttl_seconds") = 3600)
      .def(
          "create",
          [](SessionManager& s, const std::string& program, const std::string& query,
             std::uint64_t max_steps) {
            auto [id, state] = s.create(program, query, limits_of(max_steps));
            return py::make_tuple(id, from_json(state_json(state)));
          },
          py::arg("program"), py::arg("query"), py::arg("max_steps") = 100000)
      .def(
          "get", [](SessionManager& s, const std::string& id) { return from_json(state_json(s.get(id))); },
          py::arg("id"))
      .def(
          "submit",
          [](SessionManager& s, const std::string& id, std::optional<int> pick,
             std::optional<std::string> term, std::optional<std::string> expected_site) {
            if (pick.has_value() == term.has_value())
              throw py::value_error("give exactly one of pick and term");
            SubmittedMove move{MoveEntry::Pick{0}, expected_site};
            if (pick)
              move.payload = MoveEntry::Pick{*pick};
            else
              move.payload = MoveEntry::TermText{*term};
            SessionState state;
            {
              py::gil_scoped_release release;
              state = s.submit(id, move);
            }
            return from_json(state_json(state));
          },
          py::arg("id"), py::kw_only(), py::arg("pick") = py::none(), py::arg("term") = py::none(),
          py::arg("expected_site") = py::none())
      .def("close", &SessionManager::close, py::arg("id"))
      .def("expire", &SessionManager::expire)
      .def("__len__", &SessionManager::size);

  m.def(
      "handle_request",
      [](SessionManager& s, const std::string& method, const std::string& path,
         const std::string& body) {
        HttpReply r = handle_request(s, method, path, body);
        return py::make_tuple(r.status, r.body);
      },
      py::arg("sessions"), py::arg("method"), py::arg("path"), py::arg("body") = "",
      "Routes one protocol request; returns (status, JSON body).");
}
