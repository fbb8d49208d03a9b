#include "corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "taskcl/syntax.hpp"

#ifndef TASKCL_CORPUS_DIR
#error "TASKCL_CORPUS_DIR must point at the corpus directory"
#endif

namespace corpus {

std::string path(const std::string& relative) {
  return std::string(TASKCL_CORPUS_DIR) + "/" + relative;
}

std::string read(const std::string& relative) {
  std::ifstream in(path(relative), std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path(relative));
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string term_script(const std::vector<std::string>& terms) {
  std::string out = "{\"moves\":[";
  for (std::size_t i = 0; i < terms.size(); ++i)
    out += (i ? "," : "") + std::string("{\"term\":\"") + terms[i] + "\"}";
  return out + "]}";
}

std::vector<Play> plays() {
  const std::string fact_query = "forall Y. exists Z. fact(Y,Z)";
  const std::string fastfood_query = "forall X. (geq(X,3) -> m(ham) * m(coke) * m(X-3))";
  std::vector<Play> out;
  for (int n = 0; n <= 7; ++n)
    out.push_back({"factorial y=" + std::to_string(n), "factorial.taskcl", fact_query,
                   term_script({std::to_string(n)})});
  out.push_back({"factorial_literal y=0", "factorial_literal.taskcl", fact_query,
                 term_script({"0"})});
  out.push_back({"factorial_literal y=5", "factorial_literal.taskcl", fact_query,
                 read("moves/y5.json")});
  out.push_back({"lottery pick 0", "lottery.taskcl", "0 + 1000000", read("moves/pick0.json")});
  out.push_back({"lottery pick 1", "lottery.taskcl", "0 + 1000000", read("moves/pick1.json")});
  out.push_back({"fastfood pay 5", "fastfood.taskcl", fastfood_query, read("moves/pay5.json")});
  out.push_back({"fastfood pay 2", "fastfood.taskcl", fastfood_query, read("moves/pay2.json")});
  out.push_back({"fastfood both", "fastfood.taskcl",
                 "forall X. forall W. (geq(X,3) * geq(W,4) -> "
                 "m(ham) * m(coke) * m(X-3) * m(fi) * m(coke) * m(W-4))",
                 read("moves/pay5_6.json")});
  out.push_back({"horn_interp some", "horn_interp.taskcl", "pv (p a) (some (\\x. p x))",
                 "{\"moves\":[]}"});
  return out;
}

std::vector<taskcl::AgentDecl> program(const Play& p) {
  return taskcl::parse_program(read(p.program_file));
}

taskcl::Transcript batch(const Play& p, const taskcl::Limits& limits) {
  taskcl::ScriptedEnv env(taskcl::parse_moves(p.moves));
  return taskcl::solve(program(p), taskcl::parse_query(p.query), env, limits);
}

std::string text(const taskcl::Transcript& t) {
  std::string out;
  std::size_t n = 0;
  for (const auto& m : t.moves) out += taskcl::trace_line(++n, m) + "\n";
  for (const auto& c : t.consumed)
    out += "uses " + std::to_string(c.resource_id) + " " + c.site + " " +
           (c.atom.is_null() ? "-" : taskcl::pretty(c.atom)) +
           (c.kind == taskcl::Consumption::Kind::Rewrite ? " rewrite" : " goal") + "\n";
  out += std::string(taskcl::to_string(t.outcome)) + "\n";
  for (const auto& [name, value] : t.bindings) out += name + " = " + taskcl::pretty(value) + "\n";
  return out;
}

}  // namespace corpus
