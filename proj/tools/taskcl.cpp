// Command-line front end: run, verify, repl, serve.

#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "taskcl/engine.hpp"
#include "taskcl/errors.hpp"
#include "taskcl/protocol.hpp"
#include "taskcl/session.hpp"

using namespace taskcl;

namespace {

enum Exit { kSuccess = 0, kFailure = 1, kBudget = 2, kInputError = 3, kNeedsEnv = 4 };

struct InputError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void print_transcript(std::ostream& out, const Transcript& t) {
  std::size_t n = 0;
  for (const Move& m : t.moves) out << trace_line(++n, m) << "\n";
  for (const Consumption& c : t.consumed)
    out << "   uses " << c.site << ": " << (c.atom.is_null() ? "-" : pretty(c.atom))
        << (c.kind == Consumption::Kind::Rewrite ? " (rewrite)" : "") << "\n";
  for (const std::string& d : t.diagnostics) out << "   note: " << d << "\n";
}

int report(std::ostream& out, const Transcript& t, bool trace) {
  if (trace) print_transcript(out, t);
  out << to_string(t.outcome) << "\n";
  if (t.outcome == Outcome::Success)
    for (const auto& [name, value] : t.bindings) out << name << " = " << pretty(value) << "\n";
  switch (t.outcome) {
    case Outcome::Success:
      return kSuccess;
    case Outcome::Failure:
      return kFailure;
    case Outcome::BudgetExhausted:
      return kBudget;
  }
  return kFailure;
}

// The environment played by a human at the terminal.
class TerminalEnv : public EnvStrategy {
 public:
  TerminalEnv(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  EnvResponse respond(const EnvRequest& req) override {
    for (;;) {
      if (req.kind == RequestKind::ChooseBranch) {
        out_ << "env @ " << req.site << ": choose a branch\n";
        for (int i = 0; i < req.arity; ++i)
          out_ << "  " << i << ") " << (i < int(req.options.size()) ? req.options[i] : "") << "\n";
      } else {
        out_ << "env @ " << req.site << ": term for " << req.binder << "\n";
      }
      out_ << "> " << std::flush;
      std::string line;
      if (!std::getline(in_, line)) throw EnvExhausted(req.site);
      try {
        if (req.kind == RequestKind::ChooseTerm) return EnvWitness{parse_closed_term(line)};
        std::size_t used = 0;
        const int i = std::stoi(line, &used);
        if (line.find_first_not_of(" \t", used) == std::string::npos && i >= 0 && i < req.arity)
          return EnvPick{i};
      } catch (const BadTerm& e) {
        out_ << e.what() << "\n";
        continue;
      } catch (const std::logic_error&) {
      }
      out_ << "enter a number from 0 to " << req.arity - 1 << "\n";
    }
  }

 private:
  std::istream& in_;
  std::ostream& out_;
};

struct RunOptions {
  std::string program;
  std::string query;
  std::string moves;
  std::string domains;
  bool trace = false;
  std::uint64_t max_steps = 100000;
};

int cmd_run(const RunOptions& o) {
  auto program = parse_program(read_file(o.program));
  Formula query = parse_query(o.query);
  Limits limits;
  limits.max_steps = o.max_steps;
  Transcript t;
  if (!o.moves.empty()) {
    ScriptedEnv env(parse_moves(read_file(o.moves)));
    t = solve(program, query, env, limits);
  } else if (isatty(STDIN_FILENO)) {
    TerminalEnv env(std::cin, std::cout);
    t = solve(program, query, env, limits);
  } else {
    NoEnv env;
    t = solve(program, query, env, limits);
  }
  return report(std::cout, t, o.trace);
}

EnvDomains read_domains(const std::string& path) {
  EnvDomains domains;
  if (path.empty()) return domains;
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError(path + ": expected a JSON object");
  for (const auto& [key, list] : j.items()) {
    if (!list.is_array()) throw InputError(path + ": \"" + key + "\" must map to a list");
    for (const auto& item : list) {
      if (item.is_number_integer())
        domains[key].push_back(Term::integer(item.get<std::int64_t>()));
      else if (item.is_string())
        try {
          domains[key].push_back(parse_closed_term(item.get<std::string>()));
        } catch (const BadTerm& e) {
          throw InputError(path + ": " + e.what());
        }
      else
        throw InputError(path + ": \"" + key + "\" entries must be terms");
    }
  }
  return domains;
}

int cmd_verify(const RunOptions& o) {
  auto program = parse_program(read_file(o.program));
  Formula query = parse_query(o.query);
  Limits limits;
  limits.max_steps = o.max_steps;
  WinReport r = verify_winnable(program, query, read_domains(o.domains), limits);
  std::cout << (r.winnable ? "winnable" : "not winnable") << " (" << r.plays
            << (r.plays == 1 ? " play" : " plays") << ")\n";
  if (r.losing_play) {
    std::cout << "counterexample (" << to_string(r.losing_play->outcome) << "):\n";
    print_transcript(std::cout, *r.losing_play);
  }
  return r.winnable ? kSuccess : kFailure;
}

int cmd_repl(const RunOptions& o, std::istream& in, std::ostream& out) {
  auto program = parse_program(read_file(o.program));
  Limits limits;
  limits.max_steps = o.max_steps;
  bool trace = o.trace;
  out << "loaded " << program.size() << (program.size() == 1 ? " agent" : " agents")
      << "; enter a query, :trace on|off or :quit\n";
  std::string line;
  while (out << "?- " << std::flush, std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    line = line.substr(b);
    if (line == ":quit" || line == ":q") break;
    if (line == ":trace on" || line == ":trace off") {
      trace = line == ":trace on";
      continue;
    }
    if (line[0] == ':') {
      out << "unknown command " << line << "\n";
      continue;
    }
    try {
      TerminalEnv env(in, out);
      report(out, solve(program, parse_query(line), env, limits), trace);
    } catch (const EnvExhausted& e) {
      out << "input ended: " << e.what() << "\n";
      break;
    } catch (const Error& e) {
      out << "error: " << e.what() << "\n";
    }
  }
  return kSuccess;
}

int cmd_serve(int port, const std::string& host, const std::string& static_dir) {
  SessionManager sessions;
  std::optional<std::string> dir;
  if (!static_dir.empty()) {
    if (access(static_dir.c_str(), R_OK | X_OK) != 0) {
      std::cerr << "error: cannot read static directory " << static_dir << "\n";
      return kFailure;
    }
    dir = static_dir;
  }
  Server server(sessions, dir);
  if (!server.bind(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return kFailure;
  }
  std::cout << "listening on http://" << host << ":" << server.port() << std::endl;
  server.run();
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-oriented computability logic interpreter"};
  app.require_subcommand(1);
  RunOptions o;
  int port = 7117;
  std::string host = "127.0.0.1";
  std::string static_dir;

  auto* run = app.add_subcommand("run", "Play a query against a program");
  run->add_option("program", o.program, "Program file")->required();
  run->add_option("-q,--query", o.query, "Query formula")->required();
  run->add_option("--moves", o.moves, "Environment move script (JSON)");
  run->add_flag("--trace", o.trace, "Print the transcript");
  run->add_option("--max-steps", o.max_steps, "Search step budget")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Check that every environment strategy loses");
  verify->add_option("program", o.program, "Program file")->required();
  verify->add_option("-q,--query", o.query, "Query formula")->required();
  verify->add_option("--domains", o.domains, "Witness candidates per site or binder (JSON)");
  verify->add_option("--max-steps", o.max_steps, "Search step budget")->check(CLI::PositiveNumber);

  auto* repl = app.add_subcommand("repl", "Answer environment moves at the terminal");
  repl->add_option("program", o.program, "Program file")->required();
  repl->add_flag("--trace", o.trace, "Print transcripts");
  repl->add_option("--max-steps", o.max_steps, "Search step budget")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the session protocol over HTTP");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--static", static_dir, "Directory of web console assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(o);
    if (*verify) return cmd_verify(o);
    if (*repl) return cmd_repl(o, std::cin, std::cout);
    return cmd_serve(port, host, static_dir);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const PolarityError& e) {
    std::cerr << "polarity error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const EnvExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNeedsEnv;
  } catch (const DomainMissing& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNeedsEnv;
  } catch (const ScriptMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNeedsEnv;
  } catch (const OutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNeedsEnv;
  } catch (const BadTerm& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNeedsEnv;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
