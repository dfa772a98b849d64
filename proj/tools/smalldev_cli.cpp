// Copyright 2026 The smalldev Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smalldev/smalldev.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitArgument = 2;
constexpr int kExitFailure = 3;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(sdb_status s) {
  switch (s) {
    case SDB_OK: return kExitOk;
    case SDB_ERR_ARGUMENT:
    case SDB_ERR_DOMAIN: return kExitArgument;
    case SDB_ERR_VERIFICATION: return kExitViolation;
    default: return kExitFailure;
  }
}

void check(sdb_status s, const std::string& context) {
  if (s != SDB_OK)
    throw CliError{exit_code_for(s), context + ": " + sdb_status_name(s) + " error: " + sdb_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { sdb_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string floor4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", std::floor(v * 1e4 + 1e-9) / 1e4);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError{kExitFailure, "I/O error: cannot open '" + path + "' for writing"};
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
  if (!f) throw CliError{kExitFailure, "I/O error: write to '" + path + "' failed"};
}

struct ReportHandle {
  sdb_report* p = nullptr;
  ~ReportHandle() { sdb_report_free(p); }
};

// ---- reproduce ---------------------------------------------------------------

struct ReproduceArgs {
  double xi = 0.2;
  std::string out;
  std::vector<double> sweep_xi;
};

int run_reproduce(const ReproduceArgs& a) {
  std::printf("Lower bounds on Prob[sum X < 1], xi = %s\n\n", num(a.xi).c_str());
  std::printf("literature baseline: 1/13 (~0.0769)\n");
  std::printf("literature baseline: 0.125\n");
  std::printf("literature baseline: 0.14\n\n");

  nlohmann::json doc = nlohmann::json::array();
  for (int i = 0; i < sdb_variant_count(); ++i) {
    const char* name = sdb_variant_name(i);
    CString label;
    check(sdb_variant_describe(name, &label.p), name);
    ReportHandle rep;
    const auto t0 = std::chrono::steady_clock::now();
    check(sdb_feige_bound(name, a.xi, &rep.p), name);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    sdb_bound_summary s{};
    check(sdb_report_summary(rep.p, &s), name);
    CString js;
    check(sdb_report_to_json(rep.p, &js.p), name);
    auto j = nlohmann::json::parse(js.str());
    std::printf("%s: %s\n", label.str().c_str(), floor4(s.bound_value).c_str());
    std::printf("    D* = %s  value = %s  provenance = %s%s  time = %.2f s\n", num(s.d_star).c_str(),
                num(s.raw_value).c_str(), j.value("provenance", "").c_str(),
                s.crossed ? "" : "  (no crossing, endpoint used)", secs);
    if (s.s_star >= 0) std::printf("    s* = %s\n", num(s.s_star).c_str());
    doc.push_back(std::move(j));
  }

  if (!a.sweep_xi.empty()) {
    std::printf("\nExtension (not part of the reference table): bound by xi\n");
    std::printf("xi");
    for (int i = 0; i < sdb_variant_count(); ++i) std::printf(",%s", sdb_variant_name(i));
    std::printf("\n");
    for (double xi : a.sweep_xi) {
      std::printf("%s", num(xi).c_str());
      for (int i = 0; i < sdb_variant_count(); ++i) {
        ReportHandle rep;
        sdb_bound_summary s{};
        const sdb_status st = sdb_feige_bound(sdb_variant_name(i), xi, &rep.p);
        if (st == SDB_OK && sdb_report_summary(rep.p, &s) == SDB_OK)
          std::printf(",%s", num(s.bound_value).c_str());
        else
          std::printf(",nan");
      }
      std::printf("\n");
    }
  }
  if (!a.out.empty()) {
    write_file(a.out, doc.dump(2));
    std::printf("\nreports written to %s\n", a.out.c_str());
  }
  return kExitOk;
}

// ---- figure ------------------------------------------------------------------

struct FigureArgs {
  std::string which;
  std::string out;
  double xi = 0.2;
  double d_lo = 0.5;
  double d_hi = 10.0;
  double d_step = 0.05;
};

int run_figure(const FigureArgs& a) {
  CString csv;
  check(sdb_figure_csv(a.which.c_str(), a.xi, a.d_lo, a.d_hi, a.d_step, &csv.p), "figure " + a.which);
  if (a.out.empty()) {
    std::fputs(csv.str().c_str(), stdout);
  } else {
    write_file(a.out, csv.str());
    std::printf("%s written to %s\n", a.which.c_str(), a.out.c_str());
  }
  return kExitOk;
}

// ---- bound -------------------------------------------------------------------

struct BoundArgs {
  double xi = 0.2;
  bool xi_given = false;
  double d = 0.0;
  int moments = 124;
  double tb_ratio = -1.0;
  std::string out = "certificate.json";
};

int run_bound(const BoundArgs& a) {
  if (a.xi_given)
    std::printf("xi = %s\n", num(a.xi).c_str());
  else
    std::printf("xi = %s (default)\n", num(a.xi).c_str());
  std::printf("D = %s\n", num(a.d).c_str());
  std::printf("moments = MP(%s)%s\n", a.moments == 124 ? "1,2,4" : "1,2,3,4",
              a.tb_ratio > 0 ? (" refined, T_B/D = " + num(a.tb_ratio)).c_str() : "");

  sdb_moment_result mr{};
  CString cert;
  check(sdb_moment_bound(a.xi, a.d, a.moments, a.tb_ratio, &mr, &cert.p), "moment bound");
  double be = 0.0;
  if (a.tb_ratio > 0)
    check(sdb_f1_hat(a.xi, a.d, a.tb_ratio * a.d, &be), "berry-esseen bound");
  else
    check(sdb_f1(a.xi, a.d, &be), "berry-esseen bound");
  write_file(a.out, cert.str());

  const double moment_side = 1.0 - mr.opt_upper;
  const double combined = std::exp(-a.xi) * std::min(moment_side, be);
  std::printf("moment-side = %s  (certificate: %s, solver iterations %d)\n", num(moment_side).c_str(),
              a.out.c_str(), mr.solver_iterations);
  std::printf("berry-esseen side = %s  (closed-form)\n", num(be).c_str());
  std::printf("combined e^{-xi} min = %s  floor4 = %s\n", num(combined).c_str(), floor4(combined).c_str());
  return kExitOk;
}

// ---- verify ------------------------------------------------------------------

struct VerifyArgs {
  sdb_verify_options opts = sdb_verify_defaults();
  std::string out = "verify_report.json";
};

int run_verify(const VerifyArgs& a) {
  sdb_verify_summary s{};
  CString js;
  check(sdb_verify(&a.opts, &s, &js.p), "verify");
  write_file(a.out, js.str());
  std::printf("seed = %llu  trials = %d  n_max = %d  xi = %s\n", static_cast<unsigned long long>(a.opts.seed),
              a.opts.trials, a.opts.n_max, num(a.opts.xi).c_str());
  std::printf("instances checked = %d  violations = %d\n", s.instances_checked, s.violations);
  if (a.opts.moment_trials > 0)
    std::printf("moment formulas: %s (max relative error %s)\n", s.moment_formula_ok ? "ok" : "FAILED",
                num(s.moment_formula_max_error).c_str());
  if (s.max_gap >= 0) std::printf("max duality gap at operating points = %s\n", num(s.max_gap).c_str());
  std::printf("report written to %s\n", a.out.c_str());

  if (s.violations > 0) {
    const auto doc = nlohmann::json::parse(js.str());
    for (const auto& v : doc["violations"])
      std::fprintf(stderr, "violation: %s vs %s: Prob = %s < omega = %s; instance %s\n",
                   v["source"].get<std::string>().c_str(), v["claim"].get<std::string>().c_str(),
                   num(v["probability"].get<double>()).c_str(), num(v["omega"].get<double>()).c_str(),
                   v["instance"].dump().c_str());
  }
  return (s.violations > 0 || !s.moment_formula_ok) ? kExitViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified lower bounds for small deviations of sums of bounded random variables"};
  app.set_version_flag("--version", std::string(sdb_version()));
  app.require_subcommand(1);

  ReproduceArgs rep;
  auto* c_rep = app.add_subcommand("reproduce", "Recompute the table of bounds");
  c_rep->add_option("--xi", rep.xi, "Deviation xi in (0, 1]")->check(CLI::Range(1e-9, 1.0));
  c_rep->add_option("--out", rep.out, "Write all bound reports as JSON");
  c_rep->add_option("--sweep-xi", rep.sweep_xi, "Extra xi values for an extension sweep")->expected(1, -1);

  FigureArgs fig;
  auto* c_fig = app.add_subcommand("figure", "Write figure data as CSV");
  c_fig->add_option("--which", fig.which, "fig1, fig2, fig3, figA1 or fig_interplay")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "figA1", "fig_interplay"}));
  c_fig->add_option("--out", fig.out, "Output path (default: stdout)");
  c_fig->add_option("--xi", fig.xi, "Deviation xi in (0, 1]")->check(CLI::Range(1e-9, 1.0));
  c_fig->add_option("--d-lo", fig.d_lo, "Smallest D");
  c_fig->add_option("--d-hi", fig.d_hi, "Largest D");
  c_fig->add_option("--d-step", fig.d_step, "D grid step");

  BoundArgs bnd;
  auto* c_bnd = app.add_subcommand("bound", "Moment-side, Berry-Esseen side and combined bound at one D");
  auto* xi_opt = c_bnd->add_option("--xi", bnd.xi, "Deviation xi in (0, 1] (default 0.2)");
  c_bnd->add_option("--d", bnd.d, "Variance D > 0")->required();
  c_bnd->add_option("--moments", bnd.moments, "Moment set: 124 or 1234")->check(CLI::IsMember({124, 1234}));
  c_bnd->add_option("--tb-ratio", bnd.tb_ratio, "Refined bound with T_B = ratio * D (needs --moments 1234)")
      ->check(CLI::Range(1e-12, 1.0));
  c_bnd->add_option("--out", bnd.out, "Certificate JSON path");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Check every pipeline bound against exact enumeration");
  c_ver->add_option("--seed", ver.opts.seed, "Random seed");
  c_ver->add_option("--trials", ver.opts.trials, "Random instances")->check(CLI::PositiveNumber);
  c_ver->add_option("--nmax", ver.opts.n_max, "Maximum variables per instance")->check(CLI::Range(1, 24));
  c_ver->add_option("--xi", ver.opts.xi, "Deviation xi in (0, 1]")->check(CLI::Range(1e-9, 1.0));
  c_ver->add_option("--moment-trials", ver.opts.moment_trials, "Instances for the moment-formula check")
      ->check(CLI::NonNegativeNumber);
  c_ver->add_option("--gap-restarts", ver.opts.gap_restarts, "Primal-search restarts per operating point")
      ->check(CLI::NonNegativeNumber);
  c_ver->add_option("--out", ver.out, "Report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitArgument;
  }
  bnd.xi_given = xi_opt->count() > 0;

  try {
    if (*c_rep) return run_reproduce(rep);
    if (*c_fig) return run_figure(fig);
    if (*c_bnd) return run_bound(bnd);
    if (*c_ver) return run_verify(ver);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    if (e.exit_code == kExitArgument) std::fprintf(stderr, "%s", app.help().c_str());
    return e.exit_code;
  }
  return kExitArgument;
}
