// command-line front end over the C api. exit codes: 0 ok, 2 io/parse,
// 3 validation, 4 fit failure, 5 bad request/domain.
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmdur.h"

namespace {

int exit_code(rmdur_status s) {
  switch (s) {
    case RMDUR_OK:
      return 0;
    case RMDUR_ERR_IO:
    case RMDUR_ERR_PARSE:
      return 2;
    case RMDUR_ERR_VALIDATION:
      return 3;
    case RMDUR_ERR_NONCONVERGENCE:
    case RMDUR_ERR_SINGULAR:
    case RMDUR_ERR_MONOTONE:
      return 4;
    default:
      return 5;
  }
}

[[noreturn]] void die(rmdur_status s) {
  std::fprintf(stderr, "rmdur: %s\n", rmdur_last_error());
  std::exit(exit_code(s));
}

void check(rmdur_status s) {
  if (s != RMDUR_OK) die(s);
}

std::string take_string(char* p) {
  std::string s = p ? p : "";
  rmdur_string_free(p);
  return s;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "rmdur: cannot read %s\n", path.c_str());
    std::exit(2);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) {
    std::fprintf(stderr, "rmdur: cannot write %s\n", path.c_str());
    std::exit(2);
  }
}

// the same digest the library stamps into model artifacts
std::string fnv1a(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

struct manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::vector<std::string> outputs;
  std::optional<unsigned long long> seed;

  void input(const std::string& path) { inputs.emplace_back(path, fnv1a(slurp(path))); }

  void write(const std::string& dir) const {
    // kept deliberately simple: the only json the cli emits itself
    auto esc = [](const std::string& s) {
      std::string o;
      for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += c;
      }
      return o;
    };
    std::string j = "{\n  \"tool\": \"rmdur\",\n  \"version\": \"";
    j += rmdur_version();
    j += "\",\n  \"command\": \"" + esc(command) + "\",\n  \"timestamp\": \"";
    {
      std::time_t tt = std::time(nullptr);
      std::tm tm{};
      gmtime_r(&tt, &tm);
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
      j += buf;
    }
    j += "\",\n  \"inputs\": [";
    for (size_t i = 0; i < inputs.size(); ++i) {
      j += (i ? ",\n    {" : "\n    {");
      j += "\"path\": \"" + esc(inputs[i].first) + "\", \"fnv1a\": \"" + inputs[i].second + "\"}";
    }
    j += inputs.empty() ? "]" : "\n  ]";
    j += ",\n  \"outputs\": [";
    for (size_t i = 0; i < outputs.size(); ++i)
      j += (i ? ", \"" : "\"") + esc(outputs[i]) + "\"";
    j += "]";
    if (seed) j += ",\n  \"seed\": " + std::to_string(*seed);
    j += "\n}\n";
    write_file(dir + "/manifest.json", j);
  }
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "rmdur: cannot create %s: %s\n", dir.c_str(), ec.message().c_str());
    std::exit(2);
  }
}

struct dataset_handle {
  rmdur_dataset* p = nullptr;
  ~dataset_handle() { rmdur_dataset_free(p); }
};
struct model_handle {
  rmdur_model* p = nullptr;
  ~model_handle() { rmdur_model_free(p); }
};
struct prediction_handle {
  rmdur_prediction* p = nullptr;
  ~prediction_handle() { rmdur_prediction_free(p); }
};
struct simreport_handle {
  rmdur_simreport* p = nullptr;
  ~simreport_handle() { rmdur_simreport_free(p); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual restricted mean durations for promotion/retirement data"};
  app.require_subcommand(1);

  std::string data_path, sidecar_path, model_path, out_dir = ".";
  std::string schedule_path, means_path, curves_path, earnings_path, config_path;
  std::string policy_arg;
  unsigned long long seed = 0;
  bool seed_set = false;
  int threads = 0;

  auto add_data = [&](CLI::App* c) {
    c->add_option("--data", data_path, "long-format csv")->required();
    c->add_option("--sidecar", sidecar_path, "dataset sidecar json")->required();
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out-dir", out_dir, "output directory (default .)");
  };

  CLI::App* v = app.add_subcommand("validate", "check a dataset and report problems");
  add_data(v);
  add_out(v);

  CLI::App* f = app.add_subcommand("fit", "fit both hazard models and save the artifact");
  add_data(f);
  add_out(f);

  CLI::App* p = app.add_subcommand("predict", "counterfactual means, ses and curves");
  add_data(p);
  add_out(p);
  p->add_option("--model", model_path, "model artifact (default: refit from the data)");
  p->add_option("--policy", policy_arg, "column=value override (default: protected column to 0)");
  p->add_option("--threads", threads, "worker threads");

  CLI::App* cm = app.add_subcommand("compensate", "price predictions into damages");
  cm->add_option("--schedule", schedule_path, "pay schedule json")->required();
  cm->add_option("--means", means_path, "means csv from predict")->required();
  cm->add_option("--curves", curves_path, "curves csv (needed for piecewise schedules)");
  cm->add_option("--earnings", earnings_path, "observed earnings csv")->required();
  add_out(cm);

  CLI::App* s = app.add_subcommand("simulate", "run the synthetic-study harness");
  s->add_option("--config", config_path, "study config json (default: built-in design)");
  s->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    seed_set = true;
  });
  s->add_option("--threads", threads, "worker threads");
  add_out(s);

  CLI11_PARSE(app, argc, argv);

  ensure_dir(out_dir);
  manifest man;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) man.command += ' ';
    man.command += argv[i];
  }

  if (app.got_subcommand(v)) {
    man.input(data_path);
    man.input(sidecar_path);
    dataset_handle ds;
    check(rmdur_dataset_load(data_path.c_str(), sidecar_path.c_str(), &ds.p));
    char* rep = nullptr;
    check(rmdur_dataset_validate(ds.p, &rep));
    const std::string report = take_string(rep);
    write_file(out_dir + "/validation.txt", report);
    man.outputs.push_back("validation.txt");
    man.write(out_dir);
    if (!report.empty()) {
      std::fprintf(stderr, "%s", report.c_str());
      std::fprintf(stderr, "rmdur: dataset has problems\n");
      return 3;
    }
    std::printf("ok: %d subjects\n", rmdur_dataset_n(ds.p));
    return 0;
  }

  if (app.got_subcommand(f)) {
    man.input(data_path);
    man.input(sidecar_path);
    dataset_handle ds;
    check(rmdur_dataset_load(data_path.c_str(), sidecar_path.c_str(), &ds.p));
    model_handle m;
    check(rmdur_model_fit(ds.p, &m.p));
    check(rmdur_model_save(m.p, (out_dir + "/model.json").c_str()));
    char* txt = nullptr;
    check(rmdur_model_summary(m.p, "csv", &txt));
    write_file(out_dir + "/coefficients.csv", take_string(txt));
    check(rmdur_model_summary(m.p, "json", &txt));
    write_file(out_dir + "/coefficients.json", take_string(txt));
    man.outputs = {"model.json", "coefficients.csv", "coefficients.json"};
    man.write(out_dir);
    return 0;
  }

  if (app.got_subcommand(p)) {
    man.input(data_path);
    man.input(sidecar_path);
    dataset_handle ds;
    check(rmdur_dataset_load(data_path.c_str(), sidecar_path.c_str(), &ds.p));
    model_handle m;
    if (!model_path.empty()) {
      man.input(model_path);
      check(rmdur_model_load(model_path.c_str(), ds.p, &m.p));
    } else {
      check(rmdur_model_fit(ds.p, &m.p));
    }
    const char* col = nullptr;
    double val = 0.0;
    std::string colbuf;
    if (!policy_arg.empty()) {
      const auto eq = policy_arg.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "rmdur: --policy wants column=value\n");
        return 5;
      }
      colbuf = policy_arg.substr(0, eq);
      col = colbuf.c_str();
      try {
        val = std::stod(policy_arg.substr(eq + 1));
      } catch (...) {
        std::fprintf(stderr, "rmdur: --policy value is not a number\n");
        return 5;
      }
    }
    prediction_handle pr;
    check(rmdur_predict(m.p, ds.p, col, val, threads, &pr.p));
    char* txt = nullptr;
    check(rmdur_prediction_means_csv(pr.p, &txt));
    write_file(out_dir + "/means.csv", take_string(txt));
    check(rmdur_prediction_curves_csv(pr.p, &txt));
    write_file(out_dir + "/curves.csv", take_string(txt));
    man.outputs = {"means.csv", "curves.csv"};
    man.write(out_dir);
    return 0;
  }

  if (app.got_subcommand(cm)) {
    man.input(schedule_path);
    man.input(means_path);
    if (!curves_path.empty()) man.input(curves_path);
    man.input(earnings_path);
    char* txt = nullptr;
    check(rmdur_compensate(schedule_path.c_str(), means_path.c_str(),
                           curves_path.empty() ? nullptr : curves_path.c_str(),
                           earnings_path.c_str(), &txt));
    write_file(out_dir + "/damages.csv", take_string(txt));
    man.outputs = {"damages.csv"};
    man.write(out_dir);
    return 0;
  }

  if (app.got_subcommand(s)) {
    if (!config_path.empty()) man.input(config_path);
    if (seed_set) man.seed = seed;
    simreport_handle r;
    check(rmdur_simulate(config_path.empty() ? nullptr : config_path.c_str(), seed_set ? 1 : 0,
                         seed, threads, &r.p));
    char* txt = nullptr;
    check(rmdur_simreport_json(r.p, &txt));
    write_file(out_dir + "/study.json", take_string(txt));
    check(rmdur_simreport_csv(r.p, &txt));
    write_file(out_dir + "/study.csv", take_string(txt));
    man.outputs = {"study.json", "study.csv"};
    man.write(out_dir);
    return 0;
  }

  return 5;
}
