/* SPDX-License-Identifier: Apache-2.0 */

/* Checks the bundled landing-gear models and prints one line per requirement.
 *
 *   cc examples/check.c -Iinclude -L../../target/debug -lstimresp_ffi \
 *      -Wl,-rpath,../../target/debug -o check
 */

#include <stdio.h>

#include "stimresp.h"

static const char *verdict_name(StimrespVerdict v) {
    switch (v) {
    case STIMRESP_VERDICT_PASS: return "PASS";
    case STIMRESP_VERDICT_FAIL: return "FAIL";
    default: return "CRASH";
    }
}

static int check(const char *label, StimrespModel *model) {
    StimrespReport *report = NULL;
    char *err = NULL;
    size_t states = 0;

    if (stimresp_model_reach_count(model, &states) != STIMRESP_STATUS_OK) {
        fprintf(stderr, "%s: reach failed\n", label);
        return 2;
    }
    StimrespStatus st = stimresp_check(model, stimresp_lgs_requirements(), 1, &report, &err);
    if (st != STIMRESP_STATUS_OK) {
        fprintf(stderr, "%s: %s\n", label, err ? err : "check failed");
        stimresp_string_free(err);
        return 2;
    }
    printf("%s: %zu reachable states\n", label, states);
    for (size_t i = 0; i < stimresp_report_len(report); i++) {
        StimrespVerdict v;
        char *name = stimresp_report_name(report, i);
        stimresp_report_verdict(report, i, &v);
        printf("  %-5s %s\n", verdict_name(v), name);
        stimresp_string_free(name);
    }
    int passed = stimresp_report_passed(report);
    stimresp_report_free(report);
    return passed ? 0 : 1;
}

int main(void) {
    StimrespModel *fixed = stimresp_model_lgs_fixed();
    StimrespModel *original = stimresp_model_lgs_original();
    int a = check("lgs_fixed", fixed);
    int b = check("lgs_original", original);
    stimresp_model_free(fixed);
    stimresp_model_free(original);

    StimrespModel *bad = NULL;
    char *err = NULL;
    if (stimresp_model_parse("domain D {a} var x: E controlled", &bad, &err) == STIMRESP_STATUS_SEMANTIC) {
        printf("rejected: %s\n", err);
    }
    stimresp_string_free(err);

    printf("stimresp %s\n", stimresp_version());
    return (a == 0 && b == 1) ? 0 : 1;
}
