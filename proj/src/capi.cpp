#include "dwkpilot.h"

#include <cstring>
#include <new>
#include <string>

#include "clifford.hpp"
#include "error.hpp"
#include "scenario.hpp"

struct dwk_scenario {
  dwk::scenario::ScenarioConfig config;
};

struct dwk_report {
  dwk::scenario::RunReport report;
};

namespace {

void put_error(char* buf, size_t len, const std::string& msg) {
  if (!buf || len == 0) return;
  std::size_t n = std::min(msg.size(), len - 1);
  std::memcpy(buf, msg.data(), n);
  buf[n] = '\0';
}

dwk_status status_of(const dwk::Error& e) {
  switch (e.code()) {
    case dwk::ErrorCode::config_parse:
      return DWK_E_CONFIG_PARSE;
    case dwk::ErrorCode::config_range:
      return DWK_E_CONFIG_RANGE;
    default:
      return DWK_E_RUNTIME;
  }
}

template <typename Fn>
dwk_status guarded(char* errbuf, size_t errbuf_len, Fn&& fn) {
  try {
    return fn();
  } catch (const dwk::Error& e) {
    put_error(errbuf, errbuf_len, e.what());
    return status_of(e);
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return DWK_E_RUNTIME;
  } catch (...) {
    put_error(errbuf, errbuf_len, "unknown error");
    return DWK_E_RUNTIME;
  }
}

}  // namespace

extern "C" {

const char* dwk_version(void) { return "0.1.0"; }

dwk_status dwk_self_test(char* errbuf, size_t errbuf_len) {
  return guarded(errbuf, errbuf_len, []() -> dwk_status {
    const auto& basis = dwk::clifford::gamma_basis();
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        auto anti = dwk::clifford::anticommutator(basis.gamma[mu], basis.gamma[nu]);
        auto expect = basis.identity * (2.0 * basis.metric[mu][nu]);
        if (anti.max_abs_diff(expect) != 0.0)
          throw dwk::numeric_error("algebra self-test failed");
      }
    return DWK_OK;
  });
}

dwk_status dwk_scenario_load(const char* path, dwk_scenario** out, char* errbuf,
                             size_t errbuf_len) {
  if (!path || !out) {
    put_error(errbuf, errbuf_len, "null argument");
    return DWK_E_RUNTIME;
  }
  return guarded(errbuf, errbuf_len, [&]() -> dwk_status {
    auto* s = new dwk_scenario{dwk::scenario::parse_scenario_file(path)};
    *out = s;
    return DWK_OK;
  });
}

dwk_status dwk_scenario_load_json(const char* json_text, dwk_scenario** out,
                                  char* errbuf, size_t errbuf_len) {
  if (!json_text || !out) {
    put_error(errbuf, errbuf_len, "null argument");
    return DWK_E_RUNTIME;
  }
  return guarded(errbuf, errbuf_len, [&]() -> dwk_status {
    auto* s = new dwk_scenario{dwk::scenario::parse_scenario_json(json_text)};
    *out = s;
    return DWK_OK;
  });
}

const char* dwk_scenario_name(const dwk_scenario* s) {
  return s ? s->config.name.c_str() : "";
}

const char* dwk_scenario_kind(const dwk_scenario* s) {
  return s ? s->config.kind.c_str() : "";
}

void dwk_scenario_free(dwk_scenario* s) { delete s; }

dwk_status dwk_scenario_run(const dwk_scenario* s, const char* out_dir,
                            unsigned threads, dwk_report** out, char* errbuf,
                            size_t errbuf_len) {
  if (!s || !out) {
    put_error(errbuf, errbuf_len, "null argument");
    return DWK_E_RUNTIME;
  }
  return guarded(errbuf, errbuf_len, [&]() -> dwk_status {
    auto config = s->config;
    if (out_dir && *out_dir) config.output_dir = out_dir;
    auto* r = new dwk_report{
        dwk::scenario::run_scenario(config, threads == 0 ? 1 : threads)};
    *out = r;
    return r->report.all_passed() ? DWK_OK : DWK_E_CHECK_FAILED;
  });
}

size_t dwk_report_check_count(const dwk_report* r) {
  return r ? r->report.checks.size() : 0;
}

const char* dwk_report_check_name(const dwk_report* r, size_t i) {
  return (r && i < r->report.checks.size()) ? r->report.checks[i].name.c_str() : "";
}

double dwk_report_check_value(const dwk_report* r, size_t i) {
  return (r && i < r->report.checks.size()) ? r->report.checks[i].value : 0.0;
}

double dwk_report_check_tolerance(const dwk_report* r, size_t i) {
  return (r && i < r->report.checks.size()) ? r->report.checks[i].tolerance : 0.0;
}

int dwk_report_check_passed(const dwk_report* r, size_t i) {
  return (r && i < r->report.checks.size()) ? (r->report.checks[i].pass ? 1 : 0) : 0;
}

int dwk_report_all_passed(const dwk_report* r) {
  return (r && r->report.all_passed()) ? 1 : 0;
}

double dwk_report_wall_time(const dwk_report* r) {
  return r ? r->report.wall_time_s : 0.0;
}

size_t dwk_report_artifact_count(const dwk_report* r) {
  return r ? r->report.artifacts.size() : 0;
}

const char* dwk_report_artifact(const dwk_report* r, size_t i) {
  return (r && i < r->report.artifacts.size()) ? r->report.artifacts[i].c_str() : "";
}

dwk_status dwk_report_write_json(const dwk_report* r, const char* path,
                                 char* errbuf, size_t errbuf_len) {
  if (!r || !path) {
    put_error(errbuf, errbuf_len, "null argument");
    return DWK_E_RUNTIME;
  }
  return guarded(errbuf, errbuf_len, [&]() -> dwk_status {
    dwk::scenario::write_report_json(r->report, path);
    return DWK_OK;
  });
}

void dwk_report_free(dwk_report* r) { delete r; }

}  // extern "C"
