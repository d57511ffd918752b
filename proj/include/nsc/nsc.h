#ifndef NSC_NSC_H
#define NSC_NSC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NSC_API __declspec(dllexport)
#else
#define NSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsc_status {
    NSC_OK = 0,
    NSC_ERR_RANGE,
    NSC_ERR_INSUFFICIENT_DATA,
    NSC_ERR_SHAPE,
    NSC_ERR_DEGENERATE_NIV,
    NSC_ERR_DOMAIN,
    NSC_ERR_ARGUMENT_ORDER,
    NSC_ERR_EXTRACTION_FAILED,
    NSC_ERR_EMPTY_BUDGET,
    NSC_ERR_COMPENSATION_FAILED,
    NSC_ERR_PARSE,
    NSC_ERR_IO,
    NSC_ERR_INVALID_ARGUMENT,
    NSC_ERR_UNKNOWN_PRESET,
    NSC_ERR_INTERNAL
} nsc_status;

typedef enum nsc_style { NSC_STYLE_NORMAL = 0, NSC_STYLE_OVERLAP = 1 } nsc_style;
typedef enum nsc_variant { NSC_VARIANT_NSC = 0, NSC_VARIANT_NSC_D = 1 } nsc_variant;
typedef enum nsc_noise {
    NSC_NOISE_AUTO = -1,
    NSC_NOISE_WFN = 0,
    NSC_NOISE_FFN = 1,
    NSC_NOISE_RWN = 2
} nsc_noise;

typedef struct nsc_meta nsc_meta;
typedef struct nsc_dataset nsc_dataset;
typedef struct nsc_simulation nsc_simulation;
typedef struct nsc_curve nsc_curve;
typedef struct nsc_budget nsc_budget;

/* Short lowercase category such as "parse" or "extraction_failed". */
NSC_API const char* nsc_status_name(nsc_status status);
/* Message of the last failing call on this thread; "" when none. */
NSC_API const char* nsc_last_error(void);
NSC_API const char* nsc_version(void);

/* Comment metadata embedded in every written file. */
NSC_API nsc_meta* nsc_meta_new(void);
NSC_API nsc_status nsc_meta_add(nsc_meta* meta, const char* key, const char* value);
NSC_API void nsc_meta_free(nsc_meta* meta);

/* tau0_override <= 0 means use the file's "# tau0" line. */
NSC_API nsc_status nsc_dataset_read_csv(const char* path, double tau0_override, nsc_dataset** out);
NSC_API nsc_status nsc_dataset_write_csv(const nsc_dataset* data, const char* path, const nsc_meta* meta);
NSC_API size_t nsc_dataset_rows(const nsc_dataset* data);
NSC_API size_t nsc_dataset_columns(const nsc_dataset* data);
NSC_API const char* nsc_dataset_column_name(const nsc_dataset* data, size_t index);
NSC_API double nsc_dataset_tau0(const nsc_dataset* data);
NSC_API nsc_status nsc_dataset_column(const nsc_dataset* data, const char* name, const double** values,
                                      size_t* count);
/* Value of a "# key = value" line read with the data, or NULL. */
NSC_API const char* nsc_dataset_meta(const nsc_dataset* data, const char* key);
NSC_API void nsc_dataset_free(nsc_dataset* data);

/* Columns are y followed by one recorded column per effect. */
NSC_API nsc_status nsc_simulate_preset(const char* name, double scale, uint64_t seed, nsc_simulation** out);
NSC_API nsc_status nsc_simulate_config(const char* path, nsc_simulation** out);
NSC_API const nsc_dataset* nsc_simulation_data(const nsc_simulation* sim);
NSC_API uint64_t nsc_simulation_seed(const nsc_simulation* sim);
NSC_API nsc_status nsc_simulation_write_truth(const nsc_simulation* sim, const char* path, const nsc_meta* meta);
NSC_API void nsc_simulation_free(nsc_simulation* sim);

/* Allan deviation over the standard grid; writes at most `capacity` rows. */
NSC_API nsc_status nsc_adev_table(const double* values, size_t n, nsc_style style, size_t* factors,
                                  double* adev, size_t capacity, size_t* count);

typedef struct nsc_curve_options {
    nsc_style style;
    nsc_variant variant;
    nsc_noise noise;
} nsc_curve_options;

NSC_API nsc_curve_options nsc_curve_options_default(void);

typedef struct nsc_curve_point {
    size_t m;
    double tau;
    double k;
    double sigma_k;
    double edf;
} nsc_curve_point;

NSC_API nsc_status nsc_kcurve(const nsc_dataset* data, const char* y, const char* x,
                              const nsc_curve_options* options, nsc_curve** out);
NSC_API nsc_status nsc_curve_read(const char* path, nsc_curve** out);
NSC_API nsc_status nsc_curve_write(const nsc_curve* curve, const char* path, const nsc_meta* meta);
NSC_API size_t nsc_curve_size(const nsc_curve* curve);
NSC_API size_t nsc_curve_omitted(const nsc_curve* curve);
NSC_API nsc_status nsc_curve_point_at(const nsc_curve* curve, size_t index, nsc_curve_point* out);
/* Noise kind used for K_M and edf, NSC_NOISE_AUTO when none was found. */
NSC_API nsc_noise nsc_curve_noise(const nsc_curve* curve);
NSC_API void nsc_curve_free(nsc_curve* curve);

typedef struct nsc_compensation {
    int delay_min;
    int delay_max;
    size_t integral_min;
    size_t integral_max;
    /* outputs */
    int delay;
    size_t integral;
    double score;
    size_t evaluated;
    size_t degenerate;
} nsc_compensation;

NSC_API nsc_compensation nsc_compensation_default(void);
NSC_API nsc_status nsc_compensate(const nsc_dataset* data, const char* y, const char* x,
                                  const nsc_curve_options* options, nsc_compensation* search,
                                  nsc_curve** curve);

typedef struct nsc_estimate {
    double k_bar;
    double sigma_bar;
    double sigma_max;
    double sigma_total;
    size_t m_lo;
    size_t m_hi;
    double tau_lo;
    double tau_hi;
    size_t count;
} nsc_estimate;

NSC_API nsc_status nsc_extract(const nsc_curve* curve, nsc_estimate* out);

NSC_API nsc_status nsc_budget_read(const char* path, nsc_budget** out);
NSC_API nsc_status nsc_budget_parse(const char* text, nsc_budget** out);
NSC_API size_t nsc_budget_size(const nsc_budget* budget);
NSC_API nsc_status nsc_budget_entry(const nsc_budget* budget, size_t index, const char** name, double* k,
                                    double* sigma_x, double* contribution);
NSC_API double nsc_budget_u_b(const nsc_budget* budget);
NSC_API void nsc_budget_free(nsc_budget* budget);

#ifdef __cplusplus
}
#endif

#endif
