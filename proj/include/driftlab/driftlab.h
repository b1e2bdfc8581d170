#ifndef DRIFTLAB_H
#define DRIFTLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(DRIFTLAB_BUILDING)
#define DL_API __attribute__((visibility("default")))
#else
#define DL_API
#endif

typedef enum {
  DL_OK = 0,
  DL_ERR_INTERNAL = 1,
  DL_ERR_VALIDATION = 2,
  DL_ERR_NUMERICAL = 3,
  DL_ERR_IO = 4
} dl_status;

typedef enum {
  DL_FIELD_SCALAR_VERTEX = 0,
  DL_FIELD_SCALAR_CELL = 1,
  DL_FIELD_VECTOR = 2,
  DL_FIELD_SKEW = 3
} dl_field_kind;

typedef struct dl_mesh dl_mesh;
typedef struct dl_field dl_field;

DL_API const char* dl_version(void);
/* Message of the last failing call on this thread; empty after success. */
DL_API const char* dl_last_error(void);
DL_API dl_status dl_set_threads(int n);

/* domain: unit_square, unit_disk, unit_cube or unit_ball. */
DL_API dl_status dl_mesh_build(const char* domain, int resolution, double radial_grading,
                               dl_mesh** out);
DL_API dl_status dl_mesh_info(const dl_mesh* mesh, int* dim, size_t* vertices, size_t* cells,
                              double* h);
DL_API void dl_mesh_free(dl_mesh* mesh);

/* Samples an analytic spec: scalar, vector or skew spec matching the kind. */
DL_API dl_status dl_field_sample(const dl_mesh* mesh, dl_field_kind kind, const char* spec,
                                 dl_field** out);
/* Copies count values; the count must match the kind and the mesh. */
DL_API dl_status dl_field_create(const dl_mesh* mesh, dl_field_kind kind, const double* values,
                                 size_t count, dl_field** out);
DL_API dl_status dl_field_kind_of(const dl_field* field, dl_field_kind* kind);
/* The pointer stays valid until the field is freed. */
DL_API dl_status dl_field_values(const dl_field* field, const double** values, size_t* count);
DL_API void dl_field_free(dl_field* field);

DL_API dl_status dl_h1_seminorm(const dl_field* u, double* out);
DL_API dl_status dl_lp_norm(const dl_field* f, double p, double* out);
/* int A grad u . grad v for vertex fields u, v and a skew field A. */
DL_API dl_status dl_bracket(const dl_field* u, const dl_field* v, const dl_field* A, double* out);
/* Solves -div(grad u + A grad u) = g with zero boundary values. */
DL_API dl_status dl_solve(const dl_field* A, const dl_field* g, double rtol, dl_field** u_out);
/* (g, u) - int |grad u|^2. */
DL_API dl_status dl_energy_defect(const dl_field* u, const dl_field* g, double* out);
/* Excised bracket of the nonuniqueness example on a unit ball mesh. */
DL_API dl_status dl_zhikov_bracket(const dl_mesh* mesh, double rho, double* out);

/* config_json is an object of string values. On success *report_json holds
 * the report document and *summary the terminal lines; free both with
 * dl_string_free. Either output pointer may be NULL. */
DL_API dl_status dl_run_experiment(const char* subcommand, const char* config_json,
                                   const char* out_dir, uint64_t seed, char** report_json,
                                   char** summary);
/* JSON array of the keys of a subcommand: name, default (null if required), help. */
DL_API dl_status dl_experiment_keys(const char* subcommand, char** keys_json);
DL_API void dl_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
