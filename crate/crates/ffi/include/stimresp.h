/* SPDX-License-Identifier: Apache-2.0 */

#ifndef STIMRESP_H
#define STIMRESP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum StimrespStatus {
  STIMRESP_STATUS_OK = 0,
  STIMRESP_STATUS_NULL_POINTER = 1,
  STIMRESP_STATUS_INVALID_UTF8 = 2,
  /*
   Syntax error in a model or requirement source.
   */
  STIMRESP_STATUS_PARSE = 3,
  /*
   Well-formed source that fails name resolution or type checking.
   */
  STIMRESP_STATUS_SEMANTIC = 4,
  /*
   The model's `main` rule produced conflicting updates.
   */
  STIMRESP_STATUS_CRASH = 5,
  STIMRESP_STATUS_INDEX_OUT_OF_RANGE = 6,
  STIMRESP_STATUS_PANIC = 7,
} StimrespStatus;

/*
 Outcome of one requirement.
 */
typedef enum StimrespVerdict {
  STIMRESP_VERDICT_PASS = 0,
  STIMRESP_VERDICT_FAIL = 1,
  STIMRESP_VERDICT_CRASH = 2,
} StimrespVerdict;

/*
 A parsed model together with the source it came from.
 */
typedef struct StimrespModel StimrespModel;

/*
 The result of checking a requirement file against a model.
 */
typedef struct StimrespReport StimrespReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a model from NUL-terminated UTF-8 `source`.

 On success `*out` receives a new handle. On a parse or type error `*err`
 (if non-null) receives a message to be freed with `stimresp_string_free`.

 # Safety
 `source` must be a valid C string; `out` must be writable.
 */
enum StimrespStatus stimresp_model_parse(const char *source,
                                         struct StimrespModel **out,
                                         char **err);

/*
 The bundled landing-gear model with the extension sequence fixed.
 */
struct StimrespModel *stimresp_model_lgs_fixed(void);

/*
 The bundled landing-gear model that stalls on an opening door.
 */
struct StimrespModel *stimresp_model_lgs_original(void);

/*
 The bundled requirement file for the landing-gear models. Static; do not free.
 */
const char *stimresp_lgs_requirements(void);

/*
 # Safety
 `model` must be null or a handle not yet freed.
 */
void stimresp_model_free(struct StimrespModel *model);

/*
 Number of states reachable from the model's init states.

 Returns `Crash` if some reachable step has conflicting updates.

 # Safety
 `model` must be a live handle; `out` must be writable.
 */
enum StimrespStatus stimresp_model_reach_count(const struct StimrespModel *model, size_t *out);

/*
 Checks every requirement in `requirements` from every reachable state.

 `workers` above 1 checks start states on a thread pool; results do not
 depend on it. A failing requirement is not an error: inspect the report.

 # Safety
 `model` must be a live handle, `requirements` a valid C string and `out`
 writable. `err` may be null.
 */
enum StimrespStatus stimresp_check(const struct StimrespModel *model,
                                   const char *requirements,
                                   size_t workers,
                                   struct StimrespReport **out,
                                   char **err);

/*
 Number of verdicts in the report; 0 for a null handle.

 # Safety
 `report` must be null or a live handle.
 */
size_t stimresp_report_len(const struct StimrespReport *report);

/*
 Whether every requirement passed; false for a null handle.

 # Safety
 `report` must be null or a live handle.
 */
bool stimresp_report_passed(const struct StimrespReport *report);

/*
 Verdict of the `index`-th requirement, in file order.

 # Safety
 `report` must be a live handle; `out` must be writable.
 */
enum StimrespStatus stimresp_report_verdict(const struct StimrespReport *report,
                                            size_t index,
                                            enum StimrespVerdict *out);

/*
 Name of the `index`-th requirement, or null if out of range.

 # Safety
 `report` must be null or a live handle.
 */
char *stimresp_report_name(const struct StimrespReport *report, size_t index);

/*
 The report in the CLI's JSON format, or null for a null handle.

 # Safety
 `report` must be null or a live handle.
 */
char *stimresp_report_to_json(const struct StimrespReport *report);

/*
 # Safety
 `report` must be null or a handle not yet freed.
 */
void stimresp_report_free(struct StimrespReport *report);

/*
 # Safety
 `s` must be null or a string returned by this library and not yet freed.
 */
void stimresp_string_free(char *s);

/*
 Library version. Static; do not free.
 */
const char *stimresp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STIMRESP_H */
