#ifndef SDHEAT_SDHEAT_H
#define SDHEAT_SDHEAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SDHEAT_BUILDING)
#define SDH_API __attribute__((visibility("default")))
#else
#define SDH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    SDH_OK = 0,
    SDH_ERR_ARGUMENT = 2,
    SDH_ERR_CONVERGENCE = 3,
    SDH_ERR_IO = 4,
    SDH_ERR_INTERNAL = 5
} sdh_status;

typedef struct sdh_grid sdh_grid;
typedef struct sdh_coeffs sdh_coeffs;
typedef struct sdh_field sdh_field;

/* message of the last failed call on this thread; "" if none */
SDH_API const char* sdh_last_error(void);
SDH_API const char* sdh_version(void);
/* caps worker threads; n <= 0 restores the default */
SDH_API void sdh_set_threads(int n);
/* strings returned through char** out-parameters */
SDH_API void sdh_free_string(char* s);

/* lattice {-radius..radius}^dim with spacing dx; periodic != 0 wraps, else zero extension */
SDH_API sdh_status sdh_grid_create(double dx, int dim, int radius, int periodic, sdh_grid** out);
SDH_API void sdh_grid_destroy(sdh_grid* g);
SDH_API size_t sdh_grid_sites(const sdh_grid* g);
SDH_API int sdh_grid_dim(const sdh_grid* g);

/* `const:v`, `sine:a,b,k` or a CSV path */
SDH_API sdh_status sdh_coeffs_parse(const sdh_grid* g, const char* spec, sdh_coeffs** out);
/* values[site * dim + j] */
SDH_API sdh_status sdh_coeffs_create(const sdh_grid* g, const double* values, sdh_coeffs** out);
SDH_API void sdh_coeffs_destroy(sdh_coeffs* c);

/* values may be NULL for a zero field */
SDH_API sdh_status sdh_field_create(const sdh_grid* g, const double* values, sdh_field** out);
/* const:v, dirac[:a1,..], gauss:w, cos:a,b,k, sin:a,b,k or a CSV path */
SDH_API sdh_status sdh_field_parse(const sdh_grid* g, const char* spec, sdh_field** out);
SDH_API sdh_status sdh_field_read_csv(const char* path, double dx, int periodic, sdh_field** out);
/* atomic: temp file then rename */
SDH_API sdh_status sdh_field_write_csv(const sdh_field* f, const char* path);
/* same CSV as a string, release with sdh_free_string */
SDH_API sdh_status sdh_field_to_csv(const sdh_field* f, char** text);
SDH_API size_t sdh_field_size(const sdh_field* f);
SDH_API const double* sdh_field_data(const sdh_field* f);
SDH_API double sdh_field_dx(const sdh_field* f);
SDH_API int sdh_field_dim(const sdh_field* f);
SDH_API int sdh_field_radius(const sdh_field* f);
SDH_API void sdh_field_destroy(sdh_field* f);

/* constant-coefficient kernel a_alpha(t), c has dim entries */
SDH_API sdh_status sdh_kernel(const sdh_grid* g, const double* c, double t, sdh_field** out);

typedef struct {
    int m_max;
    double fitted_C;
    double fitted_C3;
    double tail_estimate;
    int quad_nodes;
} sdh_gamma_info;

/* column Gamma_{., beta}(t) by the parametrix; info may be NULL */
SDH_API sdh_status sdh_gamma(const sdh_coeffs* c, const int* beta, double t, int quad_nodes, double tol,
                             sdh_gamma_info* info, sdh_field** out);
/* same column from the matrix exponential, sup error <= tol */
SDH_API sdh_status sdh_oracle(const sdh_coeffs* c, const int* beta, double t, double tol, sdh_field** out);

/* l1 and l2 carry the dx^d weight; fields must share a grid */
SDH_API sdh_status sdh_compare(const sdh_field* a, const sdh_field* b, double* l1, double* l2, double* linf);

typedef struct {
    int panels;
    int picard_iters;
    int halvings;
    double fixed_point_residual;
    int m_max;
    int seed_columns;
    double residual; /* centred-difference ODE residual, NaN if fewer than 3 uniform times */
} sdh_solve_report;

/* du/dt = L u - Y u + f with time-constant f and Y (either may be NULL);
   out receives ntimes fields, times increasing and > 0 */
SDH_API sdh_status sdh_solve(const sdh_coeffs* c, const sdh_field* psi, const sdh_field* source,
                             const sdh_field* potential, const double* times, int ntimes, int quad_nodes,
                             double tol, sdh_solve_report* report, sdh_field** out);

/* JSON {bound_id, sup_ratio, argmax, per_dx, ...}; config is a JSON object of
   bound, dim, m, c, dxs, t_min, t_max, per_decade, x_halfwidth, alpha_max, C1, eta_halfwidth */
SDH_API sdh_status sdh_bound_check(const char* config_json, char** json_out);

SDH_API int sdh_suite_count(void);
SDH_API const char* sdh_suite_name(int i);
/* JSON {suite, pass, metrics, config_echo}; *pass set to 0/1 */
SDH_API sdh_status sdh_verify(const char* suite, uint64_t seed, int* pass, char** json_out);

#ifdef __cplusplus
}
#endif

#endif
