#include "slalom/cli.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "slalom/errors.hpp"
#include "slalom/partitions.hpp"
#include "slalom/suites.hpp"

namespace slalom {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  Index no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(no) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// One setting per key, filled from the lowest layer up.
class Settings {
 public:
  Settings(std::map<std::string, std::string> defaults) : values_(std::move(defaults)) {}

  void layer_config(const std::map<std::string, std::string>& cfg) {
    for (const auto& [k, v] : cfg) {
      if (!values_.count(k)) throw UsageError("unknown config key: " + k);
      values_[k] = v;
    }
  }
  void layer_env(const EnvLookup& env) {
    for (auto& [k, v] : values_) {
      std::string name = "SLALOMLAB_";
      for (char c : k) name += c == '-' ? '_' : char(std::toupper(static_cast<unsigned char>(c)));
      if (const char* e = env(name.c_str())) v = e;
    }
  }
  void layer_flag(const std::string& k, const CLI::Option* opt, const std::string& v) {
    if (opt->count() > 0) values_[k] = v;
  }

  const std::string& str(const std::string& k) const { return values_.at(k); }
  std::uint64_t u64(const std::string& k) const {
    const std::string& v = str(k);
    try {
      std::size_t used = 0;
      std::uint64_t x = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw UsageError(k + " must be a nonnegative integer, got '" + v + "'");
    }
  }
  json params() const {
    const std::string& v = str("params");
    if (v.empty()) return json::object();
    try {
      return json::parse(v);
    } catch (const json::exception& e) {
      throw UsageError(std::string("params is not JSON: ") + e.what());
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

std::string now_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

json read_json_arg(const std::string& arg) {
  std::ifstream f(arg);
  try {
    if (f) return json::parse(f);
    return json::parse(arg);
  } catch (const json::exception& e) {
    throw UsageError("not a JSON file or JSON text: " + arg + " (" + e.what() + ")");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"slalomlab: exact checks for slalom ideals"};
  app.require_subcommand(1);

  struct Flags {
    std::string suite, out, config, kind, name, params, seed, horizon, instances;
  } f;
  auto common = [&](CLI::App* sub, bool with_horizon) {
    sub->add_option("--seed", f.seed, "64-bit seed");
    if (with_horizon) sub->add_option("--horizon", f.horizon, "window size");
    sub->add_option("--out", f.out, "output file (default stdout)");
    sub->add_option("--config", f.config, "key=value settings file");
  };

  CLI::App* run = app.add_subcommand("run", "run a named verification suite");
  run->add_option("--suite", f.suite, "suite name");
  run->add_option("--instances", f.instances, "instance count");
  common(run, true);

  CLI::App* list = app.add_subcommand("list", "list suites, instance kinds and constructors");

  CLI::App* gen = app.add_subcommand("gen", "generate a seeded instance");
  gen->add_option("--kind", f.kind, "eps, partition, slalom or point");
  gen->add_option("--params", f.params, "JSON parameters");
  common(gen, false);

  CLI::App* cons = app.add_subcommand("construct", "run a constructor and print its witness bundle");
  cons->add_option("--name", f.name, "constructor name");
  cons->add_option("--params", f.params, "JSON parameters");
  common(cons, true);

  CLI::App* join = app.add_subcommand("join", "common coarsening of two partitions (a utility, outside the theory)");
  std::string left, right;
  join->add_option("left", left, "partition JSON or file")->required();
  join->add_option("right", right, "partition JSON or file")->required();
  std::string join_window = "8";
  auto* jw = join->add_option("--horizon", join_window, "endpoints to print");
  join->add_option("--out", f.out, "output file");

  std::vector<std::string> argv_s{"slalomlab"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) {
      for (const auto& [name, info] : suite_registry())
        out << "suite " << name << "  " << info.description << '\n';
      for (const auto& k : gen_kinds()) out << "kind " << k << '\n';
      for (const auto& c : construct_names()) out << "constructor " << c << '\n';
      return kExitOk;
    }
    if (join->parsed()) {
      IntervalPartition I = IntervalPartition::from_json(read_json_arg(left));
      IntervalPartition J = IntervalPartition::from_json(read_json_arg(right));
      IntervalPartition K = common_coarsening(I, J, 4096);
      Index w = 8;
      if (jw->count() > 0) w = std::stoull(join_window);
      json j = K.to_json(w);
      j["note"] = "utility outside the theory: endpoints common to both partitions";
      emit(f.out, j.dump() + "\n", out);
      return kExitOk;
    }

    Settings s({{"suite", ""}, {"seed", "1"}, {"horizon", "0"}, {"instances", "0"}, {"out", ""},
                {"kind", ""}, {"name", ""}, {"params", ""}});
    if (!f.config.empty()) s.layer_config(read_config(f.config));
    s.layer_env(env);
    CLI::App* active = run->parsed() ? run : gen->parsed() ? gen : cons;
    const std::pair<const char*, const std::string*> flags[] = {
        {"suite", &f.suite}, {"seed", &f.seed}, {"horizon", &f.horizon}, {"instances", &f.instances},
        {"out", &f.out},     {"kind", &f.kind}, {"name", &f.name},       {"params", &f.params}};
    for (const auto& [k, v] : flags)
      if (const CLI::Option* o = active->get_option_no_throw(std::string("--") + k)) s.layer_flag(k, o, *v);

    if (run->parsed()) {
      if (s.str("suite").empty()) throw UsageError("run needs --suite");
      SuiteSpec spec{s.str("suite"), s.u64("seed"), s.u64("horizon"), s.u64("instances")};
      SuiteResult res = run_suite(spec);
      emit(s.str("out"), res.jsonl(now_utc()), out);
      err << res.spec.suite << ": " << res.report.checked() << " checks, " << res.report.failed() << " failed, "
          << std::fixed << std::setprecision(2) << res.seconds << " s\n";
      if (res.report.certificate_error()) return kExitCertificate;
      return res.pass() ? kExitOk : kExitFailed;
    }
    if (gen->parsed()) {
      if (s.str("kind").empty()) throw UsageError("gen needs --kind");
      emit(s.str("out"), gen_instance(s.str("kind"), s.u64("seed"), s.params()).dump() + "\n", out);
      return kExitOk;
    }
    if (cons->parsed()) {
      if (s.str("name").empty()) throw UsageError("construct needs --name");
      Index h = s.u64("horizon");
      json bundle = construct(s.str("name"), s.u64("seed"), h == 0 ? 16 : h, s.params());
      emit(s.str("out"), bundle.dump() + "\n", out);
      return bundle.at("pass").get<bool>() ? kExitOk : kExitFailed;
    }
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "io: " << e.what() << '\n';
    return kExitIo;
  } catch (const CertificateError& e) {
    err << "certificate: " << e.what() << '\n';
    return kExitCertificate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace slalom
