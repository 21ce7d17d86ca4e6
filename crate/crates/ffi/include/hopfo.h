#ifndef HOPFO_H
#define HOPFO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `False` is a successful call whose answer is negative.
 *
 */
typedef enum HopfoStatus {
  HopfoStatus_Ok = 0,
  HopfoStatus_False = 1,
  HopfoStatus_NullArgument = 2,
  HopfoStatus_InvalidUtf8 = 3,
  HopfoStatus_Invalid = 4,
  HopfoStatus_Unsupported = 5,
  HopfoStatus_Panic = 6,
} HopfoStatus;

typedef struct HopfoAlgebra HopfoAlgebra;

typedef struct HopfoHopf HopfoHopf;

typedef struct HopfoModule HopfoModule;

/**
 * Message of the last failing call on this thread, or NULL. Valid until the next failing call.
 */
const char *hopfo_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void hopfo_string_free(char *s);

/**
 * Builds a builtin Hopf algebra from a spec such as "p_dg:3" or "taft:3".
 *
 * # Safety
 * `spec` must be a valid C string; `out` must be writable.
 */
enum HopfoStatus hopfo_hopf_builtin(const char *spec, struct HopfoHopf **out);

/**
 * # Safety
 * `h` must come from this library and not be freed twice.
 */
void hopfo_hopf_free(struct HopfoHopf *h);

/**
 * Dimension of the Hopf algebra (0 for NULL).
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
uintptr_t hopfo_hopf_dim(const struct HopfoHopf *h);

/**
 * The normalized integral, rendered in the basis labels.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HopfoStatus hopfo_hopf_integral(const struct HopfoHopf *h, char **out);

/**
 * The Grothendieck ring of the stable category, e.g. "Z[q]/(1+q+q^2)".
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum HopfoStatus hopfo_k0_ring(const struct HopfoHopf *h, char **out);

/**
 * A named module over `h`: "trivial", "regular", "shift", "unshift", "augmentation", "zero".
 *
 * # Safety
 * `h` must be a live handle, `name` a valid C string, `out` writable.
 */
enum HopfoStatus hopfo_module_named(const struct HopfoHopf *h,
                                    const char *name,
                                    struct HopfoModule **out);

/**
 * Parses an H-module document.
 *
 * # Safety
 * `text` must be a valid C string; `out` writable.
 */
enum HopfoStatus hopfo_module_parse(const char *text, struct HopfoModule **out);

/**
 * Serializes an H-module as a document.
 *
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum HopfoStatus hopfo_module_serialize(const struct HopfoModule *m, char **out);

/**
 * # Safety
 * `m` must come from this library and not be freed twice.
 */
void hopfo_module_free(struct HopfoModule *m);

/**
 * # Safety
 * `m` must be NULL or a live handle.
 */
uintptr_t hopfo_module_dim(const struct HopfoModule *m);

/**
 * M ⊗ N.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum HopfoStatus hopfo_module_tensor(const struct HopfoModule *a,
                                     const struct HopfoModule *b,
                                     struct HopfoModule **out);

/**
 * T(M) for `direction` = 1, T⁻¹(M) for −1.
 *
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum HopfoStatus hopfo_module_shift(const struct HopfoModule *m,
                                    int32_t direction,
                                    struct HopfoModule **out);

/**
 * `Ok` when M is projective (stably zero), `False` otherwise.
 *
 * # Safety
 * `m` must be a live handle.
 */
enum HopfoStatus hopfo_module_is_projective(const struct HopfoModule *m);

/**
 * Dimension of the stable invariants.
 *
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum HopfoStatus hopfo_module_stable_invariants_dim(const struct HopfoModule *m, uintptr_t *out);

/**
 * The class of M in the Grothendieck ring, as a reduced polynomial.
 *
 * # Safety
 * `m` must be a live handle; `out` writable.
 */
enum HopfoStatus hopfo_module_k0_class(const struct HopfoModule *m, char **out);

/**
 * A catalog module algebra, e.g. "poly_pdg:3" or "path_a2@p_dg:3".
 *
 * # Safety
 * `spec` must be a valid C string; `out` writable.
 */
enum HopfoStatus hopfo_algebra_builtin(const char *spec, struct HopfoAlgebra **out);

/**
 * # Safety
 * `a` must come from this library and not be freed twice.
 */
void hopfo_algebra_free(struct HopfoAlgebra *a);

/**
 * # Safety
 * `a` must be NULL or a live handle.
 */
uintptr_t hopfo_algebra_dim(const struct HopfoAlgebra *a);

/**
 * An element x with Λ·x = 1 when A is contractible (`Ok`); `False` and no string otherwise.
 *
 * # Safety
 * `a` must be a live handle; `out` writable.
 */
enum HopfoStatus hopfo_algebra_contractible(const struct HopfoAlgebra *a, char **out);

#endif /* HOPFO_H */
