#ifndef GNNLOGIC_H
#define GNNLOGIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AcrStatus {
  ACR_STATUS_OK = 0,
  ACR_STATUS_NULL_POINTER = 1,
  ACR_STATUS_INVALID_UTF8 = 2,
  ACR_STATUS_PARSE = 3,
  ACR_STATUS_INVALID_ARGUMENT = 4,
  ACR_STATUS_OUT_OF_RANGE = 5,
  ACR_STATUS_CAP_EXCEEDED = 6,
  ACR_STATUS_PRECONDITION = 7,
  ACR_STATUS_INTERNAL = 8,
} AcrStatus;

/*
 Global counting mode for [`acr_bisimilar`].
 */
typedef enum AcrGlobalMode {
  ACR_GLOBAL_MODE_NONE = 0,
  ACR_GLOBAL_MODE_EXACT = 1,
  ACR_GLOBAL_MODE_CAPPED = 2,
} AcrGlobalMode;

typedef struct AcrFormula AcrFormula;

typedef struct AcrGraph AcrGraph;

typedef struct AcrNet AcrNet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. Valid until
 the next failing call on the same thread.
 */
const char *acr_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void acr_string_free(char *s);

/*
 Parses a graph in the FGR text format.

 # Safety
 `src` must be a nul-terminated string and `out` writable.
 */
enum AcrStatus acr_graph_parse(const char *src, struct AcrGraph **out);

/*
 # Safety
 `g` must be a live graph handle and `out` writable.
 */
enum AcrStatus acr_graph_write(const struct AcrGraph *g, char **out);

/*
 # Safety
 `g` must be null or a handle from this library, freed at most once.
 */
void acr_graph_free(struct AcrGraph *g);

/*
 # Safety
 `g` must be a live graph handle and `out` writable.
 */
enum AcrStatus acr_graph_num_vertices(const struct AcrGraph *g, size_t *out);

/*
 The strict linear order on `n` vertices.

 # Safety
 `out` must be writable.
 */
enum AcrStatus acr_graph_order(size_t n, struct AcrGraph **out);

/*
 # Safety
 `g` must be a live graph handle and `out` writable.
 */
enum AcrStatus acr_gadgetise(const struct AcrGraph *g, struct AcrGraph **out);

/*
 # Safety
 `g` must be a live graph handle and `out` writable.
 */
enum AcrStatus acr_is_strict_linear_order(const struct AcrGraph *g, bool *out);

/*
 # Safety
 `g` must be a live graph handle and `out` writable.
 */
enum AcrStatus acr_count_p2(const struct AcrGraph *g, uint64_t *out);

/*
 # Safety
 `out` must be writable.
 */
enum AcrStatus acr_net_linear_order(struct AcrNet **out);

/*
 # Safety
 `out` must be writable.
 */
enum AcrStatus acr_net_gadget_order(struct AcrNet **out);

/*
 Parses a network in the versioned text format.

 # Safety
 `src` must be a nul-terminated string and `out` writable.
 */
enum AcrStatus acr_net_parse(const char *src, struct AcrNet **out);

/*
 # Safety
 `net` must be a live network handle and `out` writable.
 */
enum AcrStatus acr_net_write(const struct AcrNet *net, char **out);

/*
 # Safety
 `net` must be null or a handle from this library, freed at most once.
 */
void acr_net_free(struct AcrNet *net);

/*
 Classifies vertex `v`.

 # Safety
 Handles must be live and `out` writable.
 */
enum AcrStatus acr_net_run(const struct AcrNet *net, const struct AcrGraph *g, size_t v, bool *out);

/*
 Classifies every vertex into `out[0..len]`; `len` must equal the
 vertex count.

 # Safety
 Handles must be live and `out` must point to `len` writable bools.
 */
enum AcrStatus acr_net_run_all(const struct AcrNet *net,
                               const struct AcrGraph *g,
                               bool *out,
                               size_t len);

/*
 # Safety
 `src` must be a nul-terminated string and `out` writable.
 */
enum AcrStatus acr_formula_parse(const char *src, struct AcrFormula **out);

/*
 # Safety
 `f` must be a live formula handle and `out` writable.
 */
enum AcrStatus acr_formula_print(const struct AcrFormula *f, char **out);

/*
 # Safety
 `f` must be null or a handle from this library, freed at most once.
 */
void acr_formula_free(struct AcrFormula *f);

/*
 # Safety
 Handles must be live and `out` writable.
 */
enum AcrStatus acr_formula_eval(const struct AcrFormula *f,
                                const struct AcrGraph *g,
                                size_t v,
                                bool *out);

/*
 Compiles a formula for graphs with feature dimension `d`.

 # Safety
 `f` must be a live formula handle and `out` writable.
 */
enum AcrStatus acr_formula_compile(const struct AcrFormula *f, size_t d, struct AcrNet **out);

/*
 `(L,c)` graded bisimilarity with global counting. `mode` is an
 [`AcrGlobalMode`] value; `q` is read only in `Capped` mode.

 # Safety
 Handles must be live and `out` writable.
 */
enum AcrStatus acr_bisimilar(const struct AcrGraph *g1,
                             size_t v1,
                             const struct AcrGraph *g2,
                             size_t v2,
                             size_t l,
                             size_t c,
                             uint32_t mode,
                             size_t q,
                             bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GNNLOGIC_H */
