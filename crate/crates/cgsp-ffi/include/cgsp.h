/* C ABI for the cgsp coupled-pair generator.
 *
 * Link against the cgsp_ffi cdylib. All functions are thread-safe for
 * distinct handles; a single handle may be shared across threads for
 * synthesize calls (the generator is immutable after construction).
 */

#ifndef CGSP_H
#define CGSP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes. */
#define CGSP_OK 0
#define CGSP_ERR_INVALID 1    /* bad parameter (length, exponent, ...) */
#define CGSP_ERR_INFEASIBLE 2 /* target coherence exceeds 1 somewhere */
#define CGSP_ERR_SYNTHESIS 3  /* synthesis failed (broken symmetry) */
#define CGSP_ERR_NULL 4       /* required pointer was NULL */
#define CGSP_ERR_PANIC 5      /* internal panic caught at the boundary */

/* Coupling families for cgsp_generator_coupled_white. */
#define CGSP_COUPLING_NONE 0
#define CGSP_COUPLING_GAUSSIAN 1        /* param1 = width */
#define CGSP_COUPLING_EXPONENTIAL 2     /* param1 = decay */
#define CGSP_COUPLING_DAMPED_HARMONIC 3 /* param1 = decay, param2 = frequency */

/* Opaque generator handle. */
typedef struct CgspGenerator CgspGenerator;

/* Two power-law processes with a power-law coupling on an L^dim grid
 * (side a power of two >= 8, dim 1 or 2). cross_scale <= 0 selects the
 * largest feasible cross amplitude automatically; the applied value is
 * readable via cgsp_generator_cross_scale. On success writes a handle to
 * *out and returns CGSP_OK. */
int32_t cgsp_generator_power_law(uint64_t side, uint32_t dim, double gxx,
                                 double gyy, double gxy, double cross_scale,
                                 uint64_t seed, CgspGenerator **out);

/* Two coupled white noises with the given coupling family. */
int32_t cgsp_generator_coupled_white(uint64_t side, uint32_t dim,
                                     int32_t coupling, double param1,
                                     double param2, double cross_scale,
                                     uint64_t seed, CgspGenerator **out);

/* Points per output array: side^dim. Returns 0 for NULL. */
uint64_t cgsp_generator_points(const CgspGenerator *generator);

/* Maximum pointwise coherence of the scaled target triple. */
double cgsp_generator_max_coherence(const CgspGenerator *generator);

/* Cross-amplitude multiplier that was applied. */
double cgsp_generator_cross_scale(const CgspGenerator *generator);

/* Fill x_out and y_out (cgsp_generator_points doubles each, row-major for
 * dim = 2) with realization `index`. Deterministic in (seed, index). */
int32_t cgsp_generator_synthesize(const CgspGenerator *generator,
                                  uint64_t index, double *x_out,
                                  double *y_out);

/* Release a handle; NULL is a no-op. */
void cgsp_generator_free(CgspGenerator *generator);

/* Static string for an error code; never NULL. */
const char *cgsp_error_name(int32_t code);

/* Library version, e.g. "0.1.0". */
const char *cgsp_version(void);

#ifdef __cplusplus
}
#endif

#endif /* CGSP_H */
