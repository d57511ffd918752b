#include <math.h>
#include <stdio.h>
#include <string.h>

#include "nsc/nsc.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                               \
        }                                                             \
    } while (0)

int main(int argc, char** argv)
{
    EXPECT(strlen(nsc_version()) > 0);
    EXPECT(strcmp(nsc_status_name(NSC_ERR_EXTRACTION_FAILED), "extraction_failed") == 0);

    nsc_simulation* sim = NULL;
    EXPECT(nsc_simulate_preset("nope", 1.0, 1, &sim) == NSC_ERR_UNKNOWN_PRESET);
    EXPECT(sim == NULL);
    EXPECT(strstr(nsc_last_error(), "fig4_wfn") != NULL);

    EXPECT(nsc_simulate_preset("fig4_wfn", 0.01, 3, &sim) == NSC_OK);
    const nsc_dataset* data = nsc_simulation_data(sim);
    EXPECT(nsc_dataset_rows(data) == 20000);
    EXPECT(nsc_dataset_columns(data) == 2);
    EXPECT(strcmp(nsc_dataset_column_name(data, 1), "x") == 0);
    EXPECT(nsc_simulation_seed(sim) == 3);

    const double* y = NULL;
    size_t n = 0;
    EXPECT(nsc_dataset_column(data, "y", &y, &n) == NSC_OK && n == 20000);
    EXPECT(nsc_dataset_column(data, "z", &y, &n) == NSC_ERR_INVALID_ARGUMENT);

    size_t factors[8];
    double adev[8];
    size_t count = 0;
    EXPECT(nsc_adev_table(y, n, NSC_STYLE_OVERLAP, factors, adev, 8, &count) == NSC_ERR_RANGE);
    EXPECT(count == 12);

    nsc_curve* curve = NULL;
    nsc_curve_options opt = nsc_curve_options_default();
    opt.noise = NSC_NOISE_WFN;
    EXPECT(nsc_kcurve(data, "y", "x", &opt, &curve) == NSC_OK);
    EXPECT(nsc_curve_size(curve) == 12);
    EXPECT(nsc_curve_noise(curve) == NSC_NOISE_WFN);
    nsc_curve_point p;
    EXPECT(nsc_curve_point_at(curve, 0, &p) == NSC_OK);
    EXPECT(p.m == 1 && fabs(p.k - 1.0) < 5.0 * p.sigma_k);
    EXPECT(nsc_curve_point_at(curve, 99, &p) == NSC_ERR_RANGE);
    EXPECT(nsc_curve_write(curve, "/nonexistent-dir/curve.csv", NULL) == NSC_ERR_IO);
    nsc_curve_free(curve);

    opt.style = (nsc_style)7;
    EXPECT(nsc_kcurve(data, "y", "x", &opt, &curve) == NSC_ERR_INVALID_ARGUMENT);
    nsc_simulation_free(sim);

    nsc_budget* budget = NULL;
    EXPECT(nsc_budget_parse("[a]\nk = 1\nsigma_x = 3\n[b]\nk = 1\nsigma_x = 4\n", &budget) == NSC_OK);
    EXPECT(nsc_budget_size(budget) == 2);
    EXPECT(fabs(nsc_budget_u_b(budget) - 5.0) <= 5e-12);
    nsc_budget_free(budget);
    if (argc > 1) {
        EXPECT(nsc_budget_read(argv[1], &budget) == NSC_OK);
        const char* name = NULL;
        double contribution = 0.0;
        EXPECT(nsc_budget_entry(budget, 1, &name, NULL, NULL, &contribution) == NSC_OK);
        EXPECT(strcmp(name, "thermal") == 0 && contribution == 4.0);
        nsc_budget_free(budget);
    }
    EXPECT(nsc_budget_parse("", &budget) == NSC_ERR_EMPTY_BUDGET);
    EXPECT(nsc_extract(NULL, NULL) == NSC_ERR_INVALID_ARGUMENT);

    if (failures) {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return 1;
    }
    printf("c api: all checks passed\n");
    return 0;
}
