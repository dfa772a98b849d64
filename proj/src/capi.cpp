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

#include "smalldev/smalldev.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "smalldev/berry.hpp"
#include "smalldev/closed_form.hpp"
#include "smalldev/combine.hpp"
#include "smalldev/error.hpp"
#include "smalldev/moment_sdp.hpp"
#include "smalldev/numerics.hpp"
#include "smalldev/oracle.hpp"

struct sdb_instance {
  smalldev::Instance value;
};

struct sdb_report {
  smalldev::BoundReport value;
};

namespace {

thread_local std::string g_last_error;

sdb_status to_status(smalldev::ErrorCode c) {
  using smalldev::ErrorCode;
  switch (c) {
    case ErrorCode::kArgument: return SDB_ERR_ARGUMENT;
    case ErrorCode::kDomain: return SDB_ERR_DOMAIN;
    case ErrorCode::kNoIntersection: return SDB_ERR_NO_INTERSECTION;
    case ErrorCode::kNumerical: return SDB_ERR_NUMERICAL;
    case ErrorCode::kCertificateDegraded: return SDB_ERR_CERTIFICATE_DEGRADED;
    case ErrorCode::kSize: return SDB_ERR_SIZE;
    case ErrorCode::kIo: return SDB_ERR_IO;
    case ErrorCode::kVerification: return SDB_ERR_VERIFICATION;
  }
  return SDB_ERR_INTERNAL;
}

template <class F>
sdb_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SDB_OK;
  } catch (const smalldev::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SDB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SDB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return SDB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) smalldev::fail(smalldev::ErrorCode::kArgument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

smalldev::MomentSet moment_set_from_code(int code) {
  if (code == 124) return smalldev::MomentSet::k124;
  if (code == 1234) return smalldev::MomentSet::k1234;
  smalldev::fail(smalldev::ErrorCode::kArgument, "moment set must be 124 or 1234, got " + std::to_string(code));
}

}  // namespace

extern "C" {

const char* sdb_version(void) { return "0.1.0"; }

const char* sdb_status_name(sdb_status status) {
  switch (status) {
    case SDB_OK: return "ok";
    case SDB_ERR_ARGUMENT: return "argument";
    case SDB_ERR_DOMAIN: return "domain";
    case SDB_ERR_NO_INTERSECTION: return "no_intersection";
    case SDB_ERR_NUMERICAL: return "numerical";
    case SDB_ERR_CERTIFICATE_DEGRADED: return "certificate_degraded";
    case SDB_ERR_SIZE: return "size";
    case SDB_ERR_IO: return "io";
    case SDB_ERR_VERIFICATION: return "verification";
    case SDB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sdb_last_error(void) { return g_last_error.c_str(); }

void sdb_string_free(char* s) { std::free(s); }

sdb_status sdb_normal_cdf(double x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = smalldev::numerics::std_normal_cdf(x);
  });
}

sdb_status sdb_f1(double xi, double d, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = smalldev::f1(xi, d);
  });
}

sdb_status sdb_f1_hat(double xi, double d, double t_b, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = smalldev::f1_hat(xi, d, t_b);
  });
}

sdb_status sdb_f3(double xi, double d, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = smalldev::f3(xi, d);
  });
}

sdb_status sdb_closed_form_f2(double xi, double d, double* value, double* v_star) {
  return guarded([&] {
    need(value, "value");
    const auto r = smalldev::closed_form_f2(xi, d);
    *value = r.value;
    if (v_star) *v_star = r.v;
  });
}

sdb_status sdb_moment_bound(double xi, double d, int moment_set, double refined_s, sdb_moment_result* out,
                            char** certificate_json) {
  return guarded([&] {
    need(out, "out");
    const auto set = moment_set_from_code(moment_set);
    smalldev::M3Mode mode = smalldev::M3Mode::basic();
    if (refined_s > 0) {
      if (set != smalldev::MomentSet::k1234)
        smalldev::fail(smalldev::ErrorCode::kArgument, "the refined bound needs moment set 1234");
      mode = smalldev::M3Mode::refined(refined_s);
    }
    smalldev::MomentProblem problem{smalldev::shifted_moments(xi, d, mode), set};
    const auto b = smalldev::moment_bound(problem);
    out->opt_upper = b.opt_upper;
    out->probability_lower = b.probability_lower;
    out->objective_inflation = b.certificate.residuals.objective_inflation;
    out->solver_iterations = b.solver_iterations;
    if (certificate_json) *certificate_json = dup_string(smalldev::certificate_to_json(b.certificate, problem));
  });
}

sdb_status sdb_verify_certificate_json(const char* json, int* ok, char** message) {
  return guarded([&] {
    need(json, "json");
    need(ok, "ok");
    const auto cert = smalldev::certificate_from_json(json);
    const auto problem = smalldev::problem_from_certificate_json(json);
    const auto check = smalldev::verify_certificate(cert, problem);
    *ok = check.ok ? 1 : 0;
    if (message) *message = dup_string(check.message);
  });
}

int sdb_variant_count(void) { return static_cast<int>(smalldev::all_variants().size()); }

const char* sdb_variant_name(int i) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto var : smalldev::all_variants()) v.push_back(smalldev::to_string(var));
    return v;
  }();
  if (i < 0 || i >= static_cast<int>(names.size())) return nullptr;
  return names[i].c_str();
}

sdb_status sdb_variant_describe(const char* variant, char** out) {
  return guarded([&] {
    need(variant, "variant");
    need(out, "out");
    *out = dup_string(smalldev::describe(smalldev::variant_from_string(variant)));
  });
}

sdb_status sdb_feige_bound(const char* variant, double xi, sdb_report** out) {
  return guarded([&] {
    need(variant, "variant");
    need(out, "out");
    *out = nullptr;
    auto r = std::make_unique<sdb_report>();
    r->value = smalldev::feige_bound(smalldev::variant_from_string(variant), xi);
    *out = r.release();
  });
}

sdb_status sdb_report_summary(const sdb_report* report, sdb_bound_summary* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    const auto& r = report->value;
    out->xi = r.xi;
    out->d_star = r.d_star;
    out->s_star = r.variant == smalldev::Variant::kThm44Refined ? r.s_star : -1.0;
    out->moment_side = r.moment_side;
    out->be_side = r.be_side;
    out->raw_value = r.raw_value;
    out->bound_value = r.bound_value;
    out->crossed = r.crossed ? 1 : 0;
    out->certificate_count = static_cast<int>(r.moment_certificates.size());
  });
}

sdb_status sdb_report_to_json(const sdb_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(smalldev::report_to_json(report->value));
  });
}

void sdb_report_free(sdb_report* report) { delete report; }

sdb_status sdb_figure_csv(const char* which, double xi, double d_lo, double d_hi, double d_step, char** out) {
  return guarded([&] {
    need(which, "which");
    need(out, "out");
    smalldev::FigureGrid grid;
    grid.d_lo = d_lo;
    grid.d_hi = d_hi;
    grid.d_step = d_step;
    *out = dup_string(smalldev::figure_csv(smalldev::figure_from_string(which), xi, grid));
  });
}

sdb_status sdb_instance_from_json(const char* json, sdb_instance** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = nullptr;
    auto inst = std::make_unique<sdb_instance>();
    inst->value = smalldev::instance_from_json(json);
    *out = inst.release();
  });
}

sdb_status sdb_instance_stats(const sdb_instance* instance, double* d, double* t_b, double* t_m) {
  return guarded([&] {
    need(instance, "instance");
    const auto s = smalldev::stats(instance->value);
    if (d) *d = s.D;
    if (t_b) *t_b = s.T_B;
    if (t_m) *t_m = s.T_M;
  });
}

sdb_status sdb_instance_prob_le(const sdb_instance* instance, double t, double* out) {
  return guarded([&] {
    need(instance, "instance");
    need(out, "out");
    *out = smalldev::oracle::exact_sum(instance->value).prob_le(t);
  });
}

void sdb_instance_free(sdb_instance* instance) { delete instance; }

sdb_verify_options sdb_verify_defaults(void) {
  sdb_verify_options o;
  o.seed = 42;
  o.trials = 1000;
  o.n_max = 14;
  o.xi = 0.2;
  o.moment_trials = 500;
  o.gap_restarts = 20;
  return o;
}

sdb_status sdb_verify(const sdb_verify_options* options, sdb_verify_summary* out, char** report_json) {
  return guarded([&] {
    need(options, "options");
    need(out, "out");
    namespace so = smalldev::oracle;
    const auto& o = *options;
    smalldev::require(o.trials >= 1, "trials must be at least 1");
    smalldev::require(o.n_max >= 1, "n_max must be at least 1");
    smalldev::require(o.moment_trials >= 0 && o.gap_restarts >= 0, "counts must be nonnegative");

    std::vector<so::Claim> claims;
    std::vector<smalldev::BoundReport> reports;
    for (auto v : smalldev::all_variants()) {
      reports.push_back(smalldev::feige_bound(v, o.xi));
      claims.push_back({reports.back().name, std::exp(o.xi) * reports.back().bound_value});
    }
    auto rep = so::verify_bounds(o.seed, o.trials, o.n_max, o.xi, claims);

    if (o.gap_restarts > 0) {
      so::PrimalSearchOptions ps;
      ps.restarts = o.gap_restarts;
      ps.seed = o.seed;
      for (const auto& r : reports)
        for (const auto& cp : r.moment_certificates) {
          const auto primal = so::atomic_primal_search(cp.problem, ps);
          rep.max_gap = std::max(rep.max_gap, cp.certificate.objective - primal.value);
        }
    }

    out->violations = static_cast<int>(rep.violations.size());
    out->instances_checked = rep.instances_checked;
    out->moment_formula_ok = 1;
    out->moment_formula_max_error = 0.0;
    out->max_gap = rep.max_gap;
    auto doc = nlohmann::json::parse(so::verification_to_json(rep));
    if (o.moment_trials > 0) {
      const auto mf = so::verify_moment_formulas(o.seed, o.moment_trials);
      out->moment_formula_ok = mf.ok() ? 1 : 0;
      out->moment_formula_max_error = mf.max_relative_error;
      doc["moment_formulas"] = {{"trials", mf.trials},
                                {"max_relative_error", mf.max_relative_error},
                                {"bounds_hold", mf.bounds_hold},
                                {"failures", mf.failures}};
    }
    if (report_json) *report_json = dup_string(doc.dump(2));
  });
}

}  // extern "C"
