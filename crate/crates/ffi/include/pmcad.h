#ifndef PMCAD_H
#define PMCAD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmStatus {
  PM_STATUS_OK = 0,
  PM_STATUS_OTHER = 1,
  PM_STATUS_USAGE = 2,
  PM_STATUS_RESOURCE_LIMIT = 3,
  PM_STATUS_NOT_WELL_ORIENTED = 4,
  PM_STATUS_NULL_POINTER = 5,
  PM_STATUS_INVALID_UTF8 = 6,
} PmStatus;

// A cylindrical algebraic decomposition.
typedef struct PmCad PmCad;

// A formula with its variable order.
typedef struct PmFormula PmFormula;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Owned by the
// library; valid until the next failing call.
const char *pm_last_error(void);

// Library version as a static string.
const char *pm_version(void);

// # Safety
// `s` must be NULL or a string returned by this library.
void pm_string_free(char *s);

// Parses a `vars x, y . formula` document.
//
// # Safety
// `doc` must be a NUL-terminated string and `out` a valid pointer.
enum PmStatus pm_formula_parse(const char *doc, struct PmFormula **out);

// Generates a ladder formulation by kind name (e.g. "wang"). `length` is
// a rational such as "3" or "5/4", or NULL for a symbolic length; angled
// kinds use a corridor angle with tangent 1.
//
// # Safety
// `kind` must be a NUL-terminated string, `length` NULL or one, and
// `out` a valid pointer.
enum PmStatus pm_formula_generate(const char *kind, const char *length, struct PmFormula **out);

// # Safety
// `f` must be NULL or a handle from this library, not yet freed.
void pm_formula_free(struct PmFormula *f);

// The formula as a `vars ... .` document.
//
// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum PmStatus pm_formula_to_text(const struct PmFormula *f, char **out);

// Number of variables in the formula's order.
//
// # Safety
// `f` must be NULL or a live handle.
size_t pm_formula_nvars(const struct PmFormula *f);

// Eliminates the quantifiers of `f`; the result keeps `f`'s order.
// `max_cells` of 0 selects the default limit.
//
// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum PmStatus pm_qe(const struct PmFormula *f, uint64_t max_cells, struct PmFormula **out);

// Truth of a quantifier-free formula at a point given as one rational
// string per variable.
//
// # Safety
// `f` must be a live handle, `values` must point to `n` NUL-terminated
// strings and `out` must be a valid pointer.
enum PmStatus pm_formula_eval(const struct PmFormula *f,
                              const char *const *values,
                              size_t n,
                              bool *out);

// Full CAD of the atoms of a quantifier-free formula, with truth values.
//
// # Safety
// `f` must be a live handle and `out` a valid pointer.
enum PmStatus pm_cad_build(const struct PmFormula *f, uint64_t max_cells, struct PmCad **out);

// # Safety
// `c` must be NULL or a handle from this library, not yet freed.
void pm_cad_free(struct PmCad *c);

// Number of top-dimensional-level cells.
//
// # Safety
// `c` must be NULL or a live handle.
size_t pm_cad_cell_count(const struct PmCad *c);

// The CAD as JSON: order, options, projection levels and cells.
//
// # Safety
// `c` must be a live handle and `out` a valid pointer.
enum PmStatus pm_cad_to_json(const struct PmCad *c, char **out);

// Parses a formula over an explicit comma-separated order.
//
// # Safety
// `order` and `formula` must be NUL-terminated strings and `out` a valid
// pointer.
enum PmStatus pm_formula_parse_with_order(const char *order,
                                          const char *formula,
                                          struct PmFormula **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMCAD_H */
