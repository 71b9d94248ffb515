#include <stdio.h>
#include <string.h>
#include "curvkit.h"

int main(void) {
    CkMetric *m = NULL;
    if (ck_metric_from_catalog("plane-wave-linear", &m) != CK_STATUS_OK) return 10;
    if (ck_metric_dim(m) != 4) return 11;

    CkConfig cfg = ck_config_default();
    cfg.points = 4;
    CkReport *r = NULL;
    if (ck_classify(m, &cfg, &r) != CK_STATUS_OK) return 12;
    CkVerdicts v;
    if (ck_report_verdicts(r, &v) != CK_STATUS_OK) return 13;
    if (!v.two_symmetric || v.symmetric || !v.findings_pass || v.points_evaluated != 4) return 14;
    if (strstr(ck_report_json(r), "\"two_symmetric\": true") == NULL) return 15;
    ck_report_free(r);
    ck_metric_free(m);

    CkMetric *bad = NULL;
    if (ck_metric_from_catalog("no-such-entry", &bad) != CK_STATUS_UNKNOWN_ENTRY || bad != NULL) return 16;
    if (strstr(ck_last_error(), "no-such-entry") == NULL) return 17;
    printf("%s\n", ck_status_name(CK_STATUS_NUMERIC));
    return 0;
}
