#ifndef CARNOT_H
#define CARNOT_H

#include <stddef.h>
#include <stdint.h>

typedef enum CarnotStatus {
  CARNOT_STATUS_OK = 0,
  CARNOT_STATUS_NULL_POINTER = 1,
  CARNOT_STATUS_INVALID_UTF8 = 2,
  CARNOT_STATUS_PARSE = 3,
  CARNOT_STATUS_SHAPE = 4,
  CARNOT_STATUS_WEIGHTS = 5,
  CARNOT_STATUS_SINGULAR = 6,
  CARNOT_STATUS_TRUNCATION = 7,
  CARNOT_STATUS_PRECONDITION = 8,
  CARNOT_STATUS_DOMAIN = 9,
  CARNOT_STATUS_INTERNAL = 10,
  CARNOT_STATUS_PANIC = 11,
} CarnotStatus;

// A graded nilpotent group in exponential coordinates.
typedef struct CarnotGroup CarnotGroup;

// A Carnot manifold map between two structures.
typedef struct CarnotMap CarnotMap;

// A parsed Carnot structure with its validation report.
typedef struct CarnotStructure CarnotStructure;

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on the same thread.
const char *carnot_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void carnot_string_free(char *s);

// Parses a structure document. Validation problems do not fail the call;
// they are reported by [`carnot_structure_report`].
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CarnotStatus carnot_structure_parse(const char *json, struct CarnotStructure **out);

// Loads a structure from a file, falling back to the bundled fixtures.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CarnotStatus carnot_structure_load(const char *path, struct CarnotStructure **out);

// # Safety
// `s` must be null or a handle from this library.
void carnot_structure_free(struct CarnotStructure *s);

// Dimension of the manifold, 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t carnot_structure_dim(const struct CarnotStructure *s);

// Validation report as JSON, plus the Carnot coordinate check at the
// basepoint. `ok` receives 1 when there are no violations.
//
// # Safety
// `s` must be a live handle; `ok` and `out` valid pointers.
enum CarnotStatus carnot_structure_report(const struct CarnotStructure *s, int32_t *ok, char **out);

// Tangent group at `point_str`.
//
// # Safety
// `s` must be a live handle, `point_str` a NUL-terminated string and `out` a
// valid pointer.
enum CarnotStatus carnot_structure_tangent_group(const struct CarnotStructure *s,
                                                 const char *point_str,
                                                 struct CarnotGroup **out);

// # Safety
// `g` must be null or a handle from this library.
void carnot_group_free(struct CarnotGroup *g);

// `x·y`.
//
// # Safety
// `g` must be a live handle, `x` and `y` NUL-terminated strings and `out` a
// valid pointer.
enum CarnotStatus carnot_group_mul(const struct CarnotGroup *g,
                                   const char *x,
                                   const char *y,
                                   char **out);

// `x^{-1}`.
//
// # Safety
// `g` must be a live handle, `x` a NUL-terminated string and `out` a valid
// pointer.
enum CarnotStatus carnot_group_inverse(const struct CarnotGroup *g, const char *x, char **out);

// Loads a map file. Structure references resolve relative to the map file,
// then against the bundled fixtures.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CarnotStatus carnot_map_load(const char *path, struct CarnotMap **out);

// # Safety
// `m` must be null or a handle from this library.
void carnot_map_free(struct CarnotMap *m);

// 1 when the map sends `H_w` into `H'_w` at its basepoint, 0 otherwise.
//
// # Safety
// `m` must be a live handle and `ok` a valid pointer.
enum CarnotStatus carnot_map_is_carnot(const struct CarnotMap *m, int32_t *ok);

// Carnot differential at `point_str` as a JSON array of rows of rationals.
//
// # Safety
// `m` must be a live handle, `point_str` a NUL-terminated string and `out` a
// valid pointer.
enum CarnotStatus carnot_map_differential(const struct CarnotMap *m,
                                          const char *point_str,
                                          char **out);

#endif  /* CARNOT_H */
