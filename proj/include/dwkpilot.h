/* dwkpilot C API: scenario runner for the covariant pilot-wave toolkit.
 *
 * All entry points are thread-compatible (no shared mutable state); handles
 * must not be shared across threads without external synchronization.
 * Functions returning dwk_status write a human-readable message into the
 * caller's error buffer on failure.
 */
#ifndef DWKPILOT_H
#define DWKPILOT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dwk_status {
  DWK_OK = 0,
  DWK_E_CHECK_FAILED = 1, /* scenario ran, at least one check failed */
  DWK_E_CONFIG_PARSE = 2,
  DWK_E_CONFIG_RANGE = 3,
  DWK_E_RUNTIME = 4
} dwk_status;

typedef struct dwk_scenario dwk_scenario;
typedef struct dwk_report dwk_report;

const char* dwk_version(void);

/* Quick internal consistency check (algebra identities); returns DWK_OK or
 * DWK_E_RUNTIME. */
dwk_status dwk_self_test(char* errbuf, size_t errbuf_len);

/* Scenario configs are JSON files; see the README for the schema. */
dwk_status dwk_scenario_load(const char* path, dwk_scenario** out, char* errbuf,
                             size_t errbuf_len);
dwk_status dwk_scenario_load_json(const char* json_text, dwk_scenario** out,
                                  char* errbuf, size_t errbuf_len);
const char* dwk_scenario_name(const dwk_scenario* s);
const char* dwk_scenario_kind(const dwk_scenario* s);
void dwk_scenario_free(dwk_scenario* s);

/* Runs the scenario, writing CSV artifacts under out_dir (NULL keeps the
 * config's output_dir). threads == 0 means one worker. On success *out holds
 * a report handle; DWK_E_CHECK_FAILED still produces a report. */
dwk_status dwk_scenario_run(const dwk_scenario* s, const char* out_dir,
                            unsigned threads, dwk_report** out, char* errbuf,
                            size_t errbuf_len);

size_t dwk_report_check_count(const dwk_report* r);
const char* dwk_report_check_name(const dwk_report* r, size_t i);
double dwk_report_check_value(const dwk_report* r, size_t i);
double dwk_report_check_tolerance(const dwk_report* r, size_t i);
int dwk_report_check_passed(const dwk_report* r, size_t i);
int dwk_report_all_passed(const dwk_report* r);
double dwk_report_wall_time(const dwk_report* r);
size_t dwk_report_artifact_count(const dwk_report* r);
const char* dwk_report_artifact(const dwk_report* r, size_t i);
dwk_status dwk_report_write_json(const dwk_report* r, const char* path,
                                 char* errbuf, size_t errbuf_len);
void dwk_report_free(dwk_report* r);

#ifdef __cplusplus
}
#endif

#endif /* DWKPILOT_H */
