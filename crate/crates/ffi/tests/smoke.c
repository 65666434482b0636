#include <stdio.h>
#include <string.h>
#include "conebessel.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    ConebesselParams *p = NULL;
    CHECK(conebessel_params_new(0.3, 1.0, &p) == CONEBESSEL_STATUS_OK);
    double t[2] = {0.0, 0.0};
    ConebesselEval e;
    CHECK(conebessel_eval_j(p, 2, 1, false, t, 2, &e) == CONEBESSEL_STATUS_OK);
    CHECK(e.value == 1.0);
    CHECK(conebessel_eval_j(p, 7, 1, false, t, 2, &e) == CONEBESSEL_STATUS_USAGE);
    CHECK(strstr(conebessel_last_error(), "expected 7") != NULL);
    conebessel_params_free(p);

    double a[4], b[4];
    CHECK(conebessel_coeffs(3, -1.7, 1.0, a, b) == CONEBESSEL_STATUS_OK);
    ConebesselReport *r = NULL;
    CHECK(conebessel_verify_run("lemma1", 42, &r) == CONEBESSEL_STATUS_OK);
    CHECK(conebessel_report_len(r) == 1 && conebessel_report_failed(r) == 0);
    char *js = conebessel_report_json(r);
    CHECK(strstr(js, "\"lemma1\"") != NULL);
    conebessel_string_free(js);
    conebessel_report_free(r);
    printf("ok %s\n", conebessel_version());
    return 0;
}
