/* C interface to the colouring-template library. All handles are opaque; every call
 * returns a cc_status and, on failure, leaves a message for cc_last_error(). */
#ifndef COLCONT_COLCONT_H
#define COLCONT_COLCONT_H

#include <stddef.h>
#include <stdint.h>

#if defined(COLCONT_BUILDING)
#define CC_API __attribute__((visibility("default")))
#else
#define CC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cc_status {
  CC_OK = 0,
  CC_INVALID_ARGUMENT = 1,
  CC_HOST_MISMATCH = 2,
  CC_UNKNOWN_FAMILY = 3,
  CC_BUDGET_EXCEEDED = 4,
  CC_EMPTY_MEET = 5,
  CC_PARSE_ERROR = 6,
  CC_IO_ERROR = 7,
  CC_UNSUPPORTED = 8,
  CC_NON_MONOTONE = 9,
  CC_INTERNAL = 10
} cc_status;

typedef struct cc_family cc_family;
typedef struct cc_template cc_template;
typedef struct cc_report cc_report;

CC_API const char* cc_version(void);
CC_API const char* cc_status_name(cc_status status);
/* Message of the last failed call on this thread; "" if none. */
CC_API const char* cc_last_error(void);

/* Families: "rainbow-k3", "multigraph-3-4", "df-free(K3)", "mono-free(C4)", ... */
CC_API cc_status cc_family_create(const char* name, cc_family** out);
CC_API void cc_family_free(cc_family* family);
/* Newline-separated list of registered family names. */
CC_API const char* cc_family_registry(void);

/* Templates in the text format: "host <name> <n> <k>" then "<index> <palette>" lines. */
CC_API cc_status cc_template_parse(const char* text, cc_template** out);
CC_API void cc_template_free(cc_template* t);
CC_API cc_status cc_template_bad_pairs(const cc_template* t, const cc_family* family, uint64_t* out);

/* Reports carry a JSON document, optional CSV, named text artifacts and a verdict for
 * checks that can fail (1 = all assertions held). Strings live as long as the report. */
CC_API const char* cc_report_json(const cc_report* report);
CC_API const char* cc_report_csv(const cc_report* report);
CC_API size_t cc_report_artifact_count(const cc_report* report);
CC_API cc_status cc_report_artifact(const cc_report* report, size_t index, const char** name, const char** text);
CC_API int cc_report_passed(const cc_report* report);
CC_API void cc_report_free(cc_report* report);

/* options_json may be NULL or a JSON object; unknown keys are rejected. Common keys:
 * threads, node_budget, witness_cap, dominance, symmetry, chain, seed. */
CC_API cc_status cc_solve_ex(const char* host, int n, const cc_family* family, const char* options_json,
                             cc_report** out);
CC_API cc_status cc_relative_ex(const cc_template* base, const cc_family* family, const char* options_json,
                                cc_report** out);
CC_API cc_status cc_speed(const char* host, int n, const cc_family* family, const char* options_json,
                          cc_report** out);
CC_API cc_status cc_density(const char* host, const cc_family* family, int n_lo, int n_hi,
                            const char* options_json, cc_report** out);
CC_API cc_status cc_check_closed_forms(const char* case_name, int n_lo, int n_hi, const char* options_json,
                                       cc_report** out);
/* Keys: epsilon, delta, eps1, p, seed, samples, template_samples, exhaustive_budget,
 * max_containers. Artifacts: one template file per container. */
CC_API cc_status cc_containers(const char* host, int n, const cc_family* family, const char* options_json,
                               cc_report** out);
/* Keys: eps1, p, seeds (count), seed (first seed). */
CC_API cc_status cc_sparsify_stats(const char* host, int n, const cc_family* family, const char* options_json,
                                   cc_report** out);
/* p and epsilon as rational text ("1/2", "0.05"); keys: seeds, seed, threshold, threads. */
CC_API cc_status cc_transfer(const cc_family* family, int colour, int n, const char* p, const char* epsilon,
                             const char* options_json, cc_report** out);
/* Keys: max_distance (verdict bound, default 2), budget. */
CC_API cc_status cc_stability(const cc_family* family, int n, const char* theta, uint64_t bad,
                              const char* options_json, cc_report** out);
/* kind: digraph, orgraph, tournament, multigraph (d = multiplicity bound). The artifact
 * "colouring.txt" holds the encoded colouring in the template format. */
CC_API cc_status cc_encode(const char* kind, const char* text, int d, cc_report** out);

/* SHA-256 of a file as 64 hex digits plus NUL. */
CC_API cc_status cc_file_digest(const char* path, char out[65]);

#ifdef __cplusplus
}
#endif

#endif
