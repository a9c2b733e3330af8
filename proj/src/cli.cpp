#include "gljac/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "gljac/fourier.hpp"
#include "gljac/glchar.hpp"
#include "gljac/oracle.hpp"
#include "gljac/parallel.hpp"

namespace gljac::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunConfig

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"command", command}, {"n", n}, {"q", q}, {"out", out}, {"format", format}, {"threads", threads},
                   {"max_group_order", max_group_order}, {"max_space", max_space}, {"gl2", gl2}, {"oracle", oracle},
                   {"cone", cone}};
  j["theta0"] = theta0 ? nlohmann::json(*theta0) : nlohmann::json(nullptr);
  j["orbit"] = orbit ? nlohmann::json(*orbit) : nlohmann::json(nullptr);
  return j;
}

void RunConfig::merge_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"command", "n", "q", "theta0", "out", "format", "threads",
                                              "max_group_order", "max_space", "gl2", "oracle", "orbit", "cone"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key: " + key);
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  take("command", command);
  take("n", n);
  take("q", q);
  take("out", out);
  take("format", format);
  take("threads", threads);
  take("max_group_order", max_group_order);
  take("max_space", max_space);
  take("gl2", gl2);
  take("oracle", oracle);
  take("cone", cone);
  if (j.contains("theta0") && !j["theta0"].is_null()) theta0 = j["theta0"].get<std::int64_t>();
  if (j.contains("orbit") && !j["orbit"].is_null()) orbit = j["orbit"].get<std::string>();
}

// ---------------------------------------------------------------------------
// Output

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::string path_in(const RunConfig& cfg, const std::string& stem, const std::string& ext) {
  return (fs::path(cfg.out) / (stem + "." + ext)).string();
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------------------
// Validation

int require_prime_power(int q) {
  if (!prime_power(q)) throw std::invalid_argument("q = " + std::to_string(q) + " is not a prime power");
  if (q > 256) throw std::invalid_argument("q must be at most 256");
  return q;
}

void require_pipeline(const RunConfig& cfg) {
  if (cfg.n != 1 && cfg.n != 2) throw std::invalid_argument("n must be 1 or 2 (GL_2n with 2n <= 4)");
  require_prime_power(cfg.q);
}

nlohmann::json tower_polynomials(const Tower& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (int l = 0; l < t.num_levels(); ++l)
    arr.push_back({{"degree_over_Fp", t.degree(l)}, {"polynomial", std::vector<int>(t.polynomial(l).begin(), t.polynomial(l).end())}});
  return arr;
}

std::int64_t pick_theta0(const RunConfig& cfg, const Lab& lab) {
  const auto admissible = admissible_exponents(lab);
  if (admissible.empty()) throw std::invalid_argument("no admissible θ₀");
  if (!cfg.theta0) return admissible.front();
  if (!is_admissible(lab, *cfg.theta0))
    throw std::invalid_argument("θ₀ = " + std::to_string(*cfg.theta0) + " is not a regular non-trivial character of F_{q^n}^x");
  return *cfg.theta0;
}

// ---------------------------------------------------------------------------
// Commands

std::string table_csv(std::span<const NamedCharacter> rows) {
  std::ostringstream s;
  s << "character,family,class,class_size,re,im\n";
  for (const auto& row : rows) {
    const GroupDescriptor& G = row.chi.group();
    for (std::size_t c = 0; c < G.num_classes(); ++c)
      s << csv_quote(row.name) << ',' << row.family << ',' << csv_quote(G.label(c)) << ',' << G.class_size(c) << ','
        << csv_number(row.chi[c].real()) << ',' << csv_number(row.chi[c].imag()) << '\n';
  }
  return s.str();
}

int cmd_table(const RunConfig& cfg, std::ostream& out) {
  if (cfg.gl2 == cfg.oracle) throw std::invalid_argument("table needs exactly one of --gl2 or --oracle");
  require_prime_power(cfg.q);
  std::vector<NamedCharacter> rows;
  std::string stem, tag;
  if (cfg.gl2) {
    if (cfg.q > 64) throw std::invalid_argument("gl2 tables are limited to q <= 64");
    rows = gl2_table(cfg.q);
    stem = "gl2_q" + std::to_string(cfg.q);
    tag = "gl2";
  } else {
    if (cfg.n < 1 || cfg.n > kMaxDim) throw std::invalid_argument("oracle tables need 1 <= n <= 4");
    if (std::pow(static_cast<double>(cfg.q), cfg.n * cfg.n) > 1e12 ||
        gl_order(cfg.n, cfg.q) > cfg.max_group_order)
      throw BudgetExceeded("|GL_n(F_q)| exceeds max_group_order");
    auto G = standard_gl(cfg.n, cfg.q);
    rows = character_table(enumerate_group(G, cfg.max_group_order));
    stem = "oracle_n" + std::to_string(cfg.n) + "_q" + std::to_string(cfg.q);
    tag = "oracle";
  }
  const std::string path = path_in(cfg, stem, cfg.format);
  write_atomic(path, cfg.format == "json" ? dump(table_to_json(rows, tag)) : table_csv(rows));
  out << "wrote " << path << " (" << rows.size() << " characters)\n";
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json report;
  report["header"] = {{"tool", "gljac verify"}, {"generated_at", utc_now()}};
  report["parameters"] = {{"n", cfg.n}, {"q", cfg.q}};
  const std::string path = path_in(cfg, "verify_n" + std::to_string(cfg.n) + "_q" + std::to_string(cfg.q), cfg.format);

  auto write_report = [&] {
    report["header"]["total_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (cfg.format == "json") {
      write_atomic(path, dump(report));
      return;
    }
    std::ostringstream s;
    s << "# generated_at " << report["header"]["generated_at"].get<std::string>() << "\n";
    if (report["header"].contains("elapsed_ms"))
      for (const auto& [name, ms] : report["header"]["elapsed_ms"].items()) s << "# elapsed_ms " << name << ' ' << csv_number(ms.get<double>()) << "\n";
    if (report.contains("error")) s << "# error " << report["error"].get<std::string>() << "\n";
    s << "name,pass,max_abs_deviation\n";
    if (report.contains("identities"))
      for (const auto& id : report["identities"])
        s << id["name"].get<std::string>() << ',' << (id["pass"].get<bool>() ? "true" : "false") << ','
          << csv_number(id["max_abs_deviation"].get<double>()) << '\n';
    write_atomic(path, s.str());
  };

  std::shared_ptr<const Lab> lab;
  std::int64_t theta0 = 0;
  try {
    require_pipeline(cfg);
    lab = Lab::make(cfg.n, cfg.q);
    theta0 = pick_theta0(cfg, *lab);
  } catch (const std::invalid_argument& e) {
    report["error"] = e.what();
    write_report();
    throw;
  } catch (const BudgetExceeded& e) {
    report["error"] = e.what();
    write_report();
    throw;
  }

  const VerifyReport r = verify_identities(*lab, theta0);
  report["parameters"]["theta0"] = theta0;
  report["parameters"]["theta_regular"] = r.theta_regular;
  report["parameters"]["admissible_theta0"] = admissible_exponents(*lab);
  report["tower"] = tower_polynomials(*lab->tower);
  report["conventions"] = {
      {"theta0", "exponent j: theta0(g) = exp(2 pi i j/(q^n-1)) for the generator g of F_{q^n}^x (root of tower level 1)"},
      {"theta", "theta0 o Norm on F_{q^2n}^x"},
      {"theta_squared", "theta0^2, equal to theta restricted to F_{q^n}^x"},
      {"deligne_lusztig_sign", kDeligneLusztigSign},
      {"psi", "psi(u(X)) = phi(tr X), phi(x) = exp(2 pi i Tr_{F_q/F_p}(x)/p)"}};
  report["identities"] = nlohmann::json::array();
  // timings vary run to run, so they live in the header with the timestamp
  report["header"]["elapsed_ms"] = nlohmann::json::object();
  for (const auto& id : r.identities) {
    report["identities"].push_back({{"name", id.name}, {"pass", id.pass}, {"max_abs_deviation", id.max_abs_deviation}});
    report["header"]["elapsed_ms"][id.name] = id.elapsed_ms;
  }
  report["all_pass"] = r.all_pass();
  write_report();
  out << "wrote " << path << (r.all_pass() ? " (all identities pass)" : " (identity failure)") << "\n";
  return r.all_pass() ? kOk : kIdentityFailure;
}

int cmd_jacquet(const RunConfig& cfg, std::ostream& out) {
  require_pipeline(cfg);
  const auto lab = Lab::make(cfg.n, cfg.q);
  const std::int64_t theta0 = pick_theta0(cfg, *lab);
  const auto table = irreducible_table(*lab);
  const ClassFunction pp = principal_series_pi_pi(*lab, theta0);
  const St2Sp2 halves = st2_sp2(*lab, theta0);

  struct Row {
    std::string name;
    Decomposition d;
  };
  std::vector<Row> rows;
  for (const auto& [name, chi] : {std::pair<std::string, const ClassFunction*>{"pi_x_pi", &pp},
                                  {"St_2", &halves.st2},
                                  {"Sp_2", &halves.sp2}})
    rows.push_back({name, decompose(twisted_jacquet(*chi, lab->parabolic, lab->gl_n), table)});

  const std::string path = path_in(cfg, "jacquet_n" + std::to_string(cfg.n) + "_q" + std::to_string(cfg.q), cfg.format);
  if (cfg.format == "json") {
    nlohmann::json j;
    j["parameters"] = {{"n", cfg.n}, {"q", cfg.q}, {"theta0", theta0}};
    j["tower"] = tower_polynomials(*lab->tower);
    j["group"] = lab->gl_n->to_json();
    j["basis"] = nlohmann::json::array();
    for (const auto& t : table)
      j["basis"].push_back({{"name", t.name}, {"family", t.family}, {"degree", std::lround(t.chi.degree().real())}});
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) j["rows"].push_back({{"name", r.name}, {"multiplicities", r.d.multiplicities}});
    write_atomic(path, dump(j));
  } else {
    std::ostringstream s;
    s << "module,irreducible,multiplicity\n";
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.d.basis.size(); ++i) s << r.name << ',' << r.d.basis[i] << ',' << r.d.multiplicities[i] << '\n';
    write_atomic(path, s.str());
  }
  out << "wrote " << path << "\n";
  return kOk;
}

int cmd_fourier(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n < 1 || cfg.n > kMaxDim) throw std::invalid_argument("fourier needs 1 <= n <= 4");
  require_prime_power(cfg.q);
  if (cfg.orbit && cfg.cone) throw std::invalid_argument("--orbit and --cone are exclusive");
  if (std::pow(static_cast<double>(cfg.q), cfg.n * cfg.n) > static_cast<double>(cfg.max_space))
    throw BudgetExceeded("q^(n^2) exceeds max_space");
  const auto space = OrbitSpace::make(cfg.n, cfg.q);

  std::vector<std::pair<std::string, MatFunction>> inputs;
  if (cfg.orbit) {
    const std::size_t o = space->parse(*cfg.orbit);
    inputs.emplace_back("orbit " + space->orbits()[o].label.str(), orbit_indicator(space, o));
  } else {
    if (!cfg.cone)
      for (std::size_t o = 0; o < space->num_orbits(); ++o) {
        const auto& label = space->orbits()[o].label;
        if (label.is_nilpotent() || label.is_semisimple())
          inputs.emplace_back("orbit " + label.str(), orbit_indicator(space, o));
      }
    inputs.emplace_back("cone", cone_indicator(space));
  }

  std::vector<Spectrum> spectra;
  for (const auto& [name, f] : inputs) spectra.push_back(invariant_spectrum(f, name));

  const std::string stem = "fourier_n" + std::to_string(cfg.n) + "_q" + std::to_string(cfg.q);
  if (cfg.format == "json") {
    nlohmann::json j;
    j["parameters"] = {{"n", cfg.n}, {"q", cfg.q}, {"field_polynomial", std::vector<int>(space->field().polynomial().begin(), space->field().polynomial().end())}};
    j["convention"] = "f^(Y) = sum_X f(X) phi(tr(XY)), phi(x) = exp(2 pi i Tr_{F_q/F_p}(x)/p)";
    j["spectra"] = nlohmann::json::array();
    for (const auto& s : spectra) j["spectra"].push_back(spectrum_to_json(s));
    write_atomic(path_in(cfg, stem, "json"), dump(j));
    out << "wrote " << path_in(cfg, stem, "json");
  } else {
    std::ostringstream s, p;
    s << "spectrum,orbit,re,im,size\n";
    p << "spectrum,parseval_lhs,parseval_rhs,pass\n";
    for (const auto& sp : spectra) {
      std::istringstream rows(spectrum_to_csv(sp));
      std::string line;
      std::getline(rows, line);  // header
      while (std::getline(rows, line)) s << csv_quote(sp.name) << ',' << line << '\n';
      p << csv_quote(sp.name) << ',' << csv_number(sp.parseval_lhs) << ',' << csv_number(sp.parseval_rhs) << ','
        << (sp.parseval_pass ? "true" : "false") << '\n';
    }
    write_atomic(path_in(cfg, stem, "csv"), s.str());
    write_atomic(path_in(cfg, stem + "_parseval", "csv"), p.str());
    out << "wrote " << path_in(cfg, stem, "csv");
  }
  out << " (" << spectra.size() << " spectra)\n";
  const bool all = std::all_of(spectra.begin(), spectra.end(), [](const Spectrum& s) { return s.parseval_pass; });
  return all ? kOk : kIdentityFailure;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.format != "json" && cfg.format != "csv") throw std::invalid_argument("format must be json or csv");
    if (cfg.max_group_order <= 0 || cfg.max_space <= 0) throw std::invalid_argument("budgets must be positive");
    set_thread_count(cfg.threads);
    if (cfg.command == "table") return cmd_table(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "jacquet") return cmd_jacquet(cfg, out);
    if (cfg.command == "fourier") return cmd_fourier(cfg, out);
    throw std::invalid_argument(cfg.command.empty() ? "no command given" : "unknown command: " + cfg.command);
  } catch (const BudgetExceeded& e) {
    err << "gljac: budget exceeded: " << e.what() << "\n";
    return kBudgetExceeded;
  } catch (const std::invalid_argument& e) {
    err << "gljac: invalid parameters: " << e.what() << "\n";
    return kInvalidParameters;
  } catch (const NumericalError& e) {
    err << "gljac: numerical check failed: " << e.what() << "\n";
    return kIdentityFailure;
  } catch (const std::exception& e) {
    err << "gljac: " << e.what() << "\n";
    return kIdentityFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Characters of GL_n(F_q), twisted Jacquet modules and Fourier transforms on M_n(F_q)", "gljac"};
  app.require_subcommand(0, 1);

  RunConfig flags;
  std::int64_t theta0 = 0;
  std::string orbit, config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;

  auto common = [&](CLI::App* sub) {
    overrides.emplace_back(sub->add_option("--format", flags.format, "json or csv")->check(CLI::IsMember({"json", "csv"})),
                           [&](RunConfig& c) { c.format = flags.format; });
    overrides.emplace_back(sub->add_option("--out", flags.out, "output directory"), [&](RunConfig& c) { c.out = flags.out; });
    overrides.emplace_back(sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)"),
                           [&](RunConfig& c) { c.threads = flags.threads; });
    overrides.emplace_back(sub->add_option("--max-group-order", flags.max_group_order, "enumeration budget for |G|"),
                           [&](RunConfig& c) { c.max_group_order = flags.max_group_order; });
    overrides.emplace_back(sub->add_option("--max-space", flags.max_space, "budget for q^(n^2)"),
                           [&](RunConfig& c) { c.max_space = flags.max_space; });
    overrides.emplace_back(sub->add_option("--n", flags.n, "matrix size"), [&](RunConfig& c) { c.n = flags.n; });
    overrides.emplace_back(sub->add_option("--q", flags.q, "field order"), [&](RunConfig& c) { c.q = flags.q; });
  };
  app.add_option("--config", config_path, "JSON file with RunConfig keys; flags override it");

  auto* table = app.add_subcommand("table", "write a character table");
  common(table);
  overrides.emplace_back(table->add_flag("--gl2", flags.gl2, "explicit GL_2(F_q) table"), [&](RunConfig& c) { c.gl2 = flags.gl2; });
  overrides.emplace_back(table->add_flag("--oracle", flags.oracle, "Dixon-Schneider table of GL_n(F_q)"),
                         [&](RunConfig& c) { c.oracle = flags.oracle; });

  auto* verify = app.add_subcommand("verify", "check the St_2/Sp_2 identities");
  auto* jacquet = app.add_subcommand("jacquet", "decompose the twisted Jacquet modules");
  for (auto* sub : {verify, jacquet}) {
    common(sub);
    overrides.emplace_back(sub->add_option("--theta0", theta0, "exponent of theta_0 on F_{q^n}^x"),
                           [&](RunConfig& c) { c.theta0 = theta0; });
  }

  auto* fourier = app.add_subcommand("fourier", "spectra of orbit indicators on M_n(F_q)");
  common(fourier);
  overrides.emplace_back(fourier->add_option("--orbit", orbit, "orbit label, e.g. nilpotent:[2]"),
                         [&](RunConfig& c) { c.orbit = orbit; });
  overrides.emplace_back(fourier->add_flag("--cone", flags.cone, "nilpotent cone only"), [&](RunConfig& c) { c.cone = flags.cone; });
  for (auto* sub : {table, verify, jacquet, fourier}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gljac: " << e.what() << "\n";
    return kInvalidParameters;
  }

  RunConfig cfg;
  if (!config_path.empty()) {
    try {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config " + config_path);
      cfg.merge_json(nlohmann::json::parse(in));
    } catch (const std::exception& e) {
      err << "gljac: invalid config: " << e.what() << "\n";
      return kInvalidParameters;
    }
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  for (auto& [opt, apply] : overrides)
    if (opt->count() > 0) apply(cfg);
  return execute(cfg, out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace gljac::cli
