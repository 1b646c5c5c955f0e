#include "aa/solver.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aa/errors.hpp"

namespace aa::sat {

namespace {

class CdclSession : public SolverSession {
 public:
  explicit CdclSession(const CnfFormula& cnf) {
    vars_ = cnf.var_count;
    solver_.add_cnf(cnf);
  }

  void add_clause(std::span<const Lit> clause) override { solver_.add_clause(clause); }

  std::optional<Model> solve(std::span<const Lit> assumptions) override {
    if (!solver_.solve(assumptions)) return std::nullopt;
    Model m = solver_.model();
    if (m.size() < vars_ + 1) m.resize(vars_ + 1, false);
    return m;
  }

 private:
  CdclSolver solver_;
  std::size_t vars_ = 0;
};

class CdclBackend : public SolverBackend {
 public:
  std::string name() const override { return "cdcl"; }
  std::unique_ptr<SolverSession> open(const CnfFormula& cnf) const override {
    return std::make_unique<CdclSession>(cnf);
  }
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

class ExternalSession : public SolverSession {
 public:
  ExternalSession(std::string command, const CnfFormula& cnf) : command_(std::move(command)), cnf_(cnf) {}

  void add_clause(std::span<const Lit> clause) override {
    Clause c(clause.begin(), clause.end());
    for (Lit l : c)
      if (static_cast<std::size_t>(std::abs(l)) > cnf_.var_count) cnf_.var_count = static_cast<std::size_t>(std::abs(l));
    cnf_.add(std::move(c));
  }

  std::optional<Model> solve(std::span<const Lit> assumptions) override {
    CnfFormula query = cnf_;
    for (Lit a : assumptions) query.add({a});

    char tmpl[] = "/tmp/aa_cnf_XXXXXX";
    const int fd = ::mkstemp(tmpl);
    if (fd < 0) throw SolverFailure("cannot create temporary DIMACS file");
    ::close(fd);
    const std::filesystem::path path = tmpl;
    {
      std::ofstream out(path);
      write_dimacs(out, query);
    }
    const std::string cmd = command_ + " " + shell_quote(path.string()) + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
      std::filesystem::remove(path);
      throw SolverFailure("cannot launch solver: " + command_);
    }
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    std::filesystem::remove(path);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (code == 20) return std::nullopt;
    auto model = parse_competition_output(output, query.var_count);
    if (code == 10 && !model) throw SolverFailure("solver exit code 10 but output says UNSAT");
    return model;
  }

 private:
  std::string command_;
  CnfFormula cnf_;
};

class ExternalBackend : public SolverBackend {
 public:
  explicit ExternalBackend(std::string command) : command_(std::move(command)) {}
  std::string name() const override { return "exec:" + command_; }
  std::unique_ptr<SolverSession> open(const CnfFormula& cnf) const override {
    return std::make_unique<ExternalSession>(command_, cnf);
  }

 private:
  std::string command_;
};

}  // namespace

std::unique_ptr<SolverBackend> make_cdcl_backend() { return std::make_unique<CdclBackend>(); }

std::unique_ptr<SolverBackend> make_external_backend(std::string command) {
  return std::make_unique<ExternalBackend>(std::move(command));
}

std::unique_ptr<SolverBackend> make_backend(std::string_view spec) {
  if (spec.empty() || spec == "cdcl") return make_cdcl_backend();
  constexpr std::string_view prefix = "exec:";
  if (spec.starts_with(prefix) && spec.size() > prefix.size())
    return make_external_backend(std::string(spec.substr(prefix.size())));
  throw SolverFailure("unknown solver backend '" + std::string(spec) + "'");
}

std::unique_ptr<SolverBackend> backend_from_env() {
  const char* env = std::getenv("AA_SOLVER");
  return make_backend(env ? std::string_view(env) : std::string_view{});
}

std::optional<Model> parse_competition_output(std::string_view text, std::size_t var_count) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<bool> sat;
  Model model(var_count + 1, false);
  while (std::getline(in, line)) {
    if (line.starts_with("s ")) {
      if (line.find("UNSATISFIABLE") != std::string::npos) sat = false;
      else if (line.find("SATISFIABLE") != std::string::npos) sat = true;
      else throw SolverFailure("solver reported: " + line);
    } else if (line.starts_with("v ")) {
      std::istringstream vs(line.substr(2));
      long long lit = 0;
      while (vs >> lit) {
        if (lit == 0) continue;
        const auto v = static_cast<std::size_t>(lit < 0 ? -lit : lit);
        if (v > var_count) model.resize(v + 1, false);
        model[v] = lit > 0;
      }
    }
  }
  if (!sat) throw SolverFailure("solver output has no status line");
  if (!*sat) return std::nullopt;
  return model;
}

}  // namespace aa::sat
