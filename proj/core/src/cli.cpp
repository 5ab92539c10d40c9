#include "levyflow/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "levyflow/config.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/experiments.hpp"
#include "levyflow/serialize.hpp"

namespace levyflow {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Outputs {
 public:
  Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  const fs::path& dir() const { return dir_; }

  void csv(const std::string& name, const std::string& header,
           const std::vector<std::vector<double>>& rows) const {
    std::ostringstream os;
    os << header << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i]);
      os << "\n";
    }
    write_text(dir_ / name, os.str());
  }

 private:
  fs::path dir_;
};

struct Context {
  const ExperimentConfig& cfg;
  const Outputs& out;
  std::ostream& log;
  GaugeField field;
  std::vector<Curve> curves;
  std::optional<FlowRun> flow;
};

const FlowRun& configured_flow(Context& ctx, bool write_snapshots) {
  if (!ctx.flow) {
    ctx.log << "  integrating the configured flow on " << ctx.cfg.flow.grid << "^" << ctx.cfg.dim
            << " ..." << std::endl;
    std::function<void(const FlowState&)> save;
    if (write_snapshots) {
      const fs::path dir = ctx.out.dir() / "snapshots";
      fs::create_directories(dir);
      save = [dir, n = 0](const FlowState& st) mutable {
        char name[32];
        std::snprintf(name, sizeof name, "state_%04d", n++);
        save_field(st.field, dir / name);
      };
    }
    ctx.flow = run_configured_flow(ctx.cfg, save);
    const auto& log = ctx.flow->trajectory->log();
    std::vector<std::vector<double>> rows;
    for (const auto& e : log) rows.push_back({e.s, e.action, e.rhs_norm});
    ctx.out.csv("heatflow.csv", "s,action,rhs_norm", rows);
  }
  return *ctx.flow;
}

void run_transport(Context& ctx, VerificationReport& rep) {
  rep.merge(check_transport_laws(ctx.field, ctx.curves, ctx.cfg), "transport");
}

void run_duhamel(Context& ctx, VerificationReport& rep) {
  rep.merge(check_duhamel(ctx.cfg), "duhamel");
}

void run_gradient(Context& ctx, VerificationReport& rep) {
  rep.merge(check_first_derivative(ctx.field, ctx.curves, ctx.cfg), "gradient");
  rep.merge(check_gradient(ctx.field, ctx.curves, ctx.cfg), "gradient");
  rep.merge(check_functionals(ctx.curves, ctx.cfg), "functional");
}

void run_levy(Context& ctx, VerificationReport& rep) {
  rep.merge(check_kernels(ctx.field, ctx.curves, ctx.cfg), "levy");
  const LaplacianIdentity id = verify_laplacian_identity(ctx.field, ctx.curves, ctx.cfg);
  rep.merge(id.report, "levy");
  for (std::size_t c = 0; c < ctx.curves.size(); ++c) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : id.sweep) {
      if (row.curve == static_cast<int>(c)) {
        rows.push_back({static_cast<double>(row.n), row.err_abs, row.err_rel});
      }
    }
    char name[40];
    std::snprintf(name, sizeof name, "cesaro_curve%02zu.csv", c);
    ctx.out.csv(name, "n,err_abs,err_rel", rows);
  }
}

void run_heatflow(Context& ctx, VerificationReport& rep) {
  rep.merge(check_heat_flow(ctx.cfg, configured_flow(ctx, true)), "heatflow");
}

void run_theorem(Context& ctx, VerificationReport& rep) {
  rep.merge(verify_main_theorem(ctx.cfg, configured_flow(ctx, false), ctx.curves), "theorem");
}

void run_r(Context& ctx, VerificationReport& rep) {
  const RDiagnostic diag = run_r_diagnostic(ctx.cfg, configured_flow(ctx, false), ctx.curves.at(0));
  rep.merge(diag.report, "r");
  std::ostringstream os;
  os << "flow,r,R_integral,R_definition,mismatch\n";
  for (const auto& [label, rows] : diag.tables) {
    for (const auto& row : rows) {
      os << label << "," << num(row.r) << "," << num(row.integral.norm()) << ","
         << num(row.definition.norm()) << "," << num((row.integral - row.definition).norm())
         << "\n";
    }
  }
  write_text(ctx.out.dir() / "r_diagnostic.csv", os.str());
}

using Runner = void (*)(Context&, VerificationReport&);

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> table{
      {"transport", run_transport},       {"verify-duhamel", run_duhamel},
      {"verify-gradient", run_gradient},  {"levy", run_levy},
      {"heatflow", run_heatflow},         {"verify-theorem", run_theorem},
      {"r-diagnostic", run_r},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : runners()) v.push_back(name);
    v.push_back("all");
    return v;
  }();
  return names;
}

int run(const Command& cmd, std::ostream& log, std::ostream& err) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), cmd.subcommand) == names.end()) {
    err << "levyflow: unknown subcommand '" << cmd.subcommand << "'\n";
    return kExitConfigError;
  }
  try {
    std::vector<std::string> overrides = cmd.overrides;
    if (cmd.seed) overrides.push_back("seed=" + std::to_string(*cmd.seed));
    if (cmd.threads) overrides.push_back("threads=" + std::to_string(*cmd.threads));
    const ExperimentConfig cfg = load_config(cmd.config, overrides);

    const Outputs out(cmd.out / cmd.subcommand);
    Context ctx{cfg, out, log, make_field(cfg), make_curves(cfg), std::nullopt};
    VerificationReport rep(cmd.subcommand);
    for (const auto& [name, fn] : runners()) {
      if (cmd.subcommand != "all" && cmd.subcommand != name) continue;
      log << cmd.subcommand << ": " << name << std::endl;
      fn(ctx, rep);
    }

    json doc = rep.to_json();
    doc["config"] = to_json(cfg);
    write_text(out.dir() / (cmd.subcommand + ".report.json"), doc.dump(2) + "\n");
    write_text(out.dir() / "timing.json", rep.timing_json().dump(2) + "\n");
    const std::string summary = rep.summary();
    write_text(out.dir() / "summary.txt", summary);
    log << summary;
    return rep.passed() ? kExitPass : kExitCheckFailed;
  } catch (const ConfigError& e) {
    err << "levyflow: configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalAbort& e) {
    err << "levyflow: numerical abort: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const DomainError& e) {
    err << "levyflow: invalid input: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "levyflow: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace levyflow
