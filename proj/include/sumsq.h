#ifndef SUMSQ_H
#define SUMSQ_H

/* C interface to the sum-of-squares toolkit.
 *
 * Every entry point returns one of the status codes below. Requests
 * and results are JSON text; result strings are heap-allocated and
 * must be released with sumsq_free. On SUMSQ_ERROR the output pointer
 * is left null and sumsq_last_error() describes the problem.
 */

#ifdef __cplusplus
extern "C" {
#endif

#define SUMSQ_OK 0    /* success; the query found what it asked for */
#define SUMSQ_ERROR 1 /* bad input or solver breakdown; see sumsq_last_error */
#define SUMSQ_NONE 2  /* well-posed question, negative answer */

/* Library version as "major.minor.patch". Static storage; do not free. */
const char* sumsq_version(void);

/* Message from the most recent failing call on this thread. Static
 * storage; valid until the next failing call. */
const char* sumsq_last_error(void);

/* Releases any string returned through a char** parameter. */
void sumsq_free(char* text);

/* Decides whether a polynomial is a sum of squares.
 * Request: {"variables": ["x","y"], "polynomial": "2*x^4 + y^2",
 *           "rational": false, "digits": 5,
 *           "tol": 1e-8, "max_iter": 100}
 * (all fields after "polynomial" optional).
 * Result: {"status": "found"|"infeasible"|"rounding_failed",
 *          "factors": [...], "residual": r} plus, for exact
 * certificates, {"denominator": "D", "basis": [...],
 *                "Q_numerator": [[..]]} with p = Z' (Qnum/D) Z.
 * Returns SUMSQ_OK when found, SUMSQ_NONE otherwise. */
int sumsq_findsos(const char* request_json, char** result_json);

/* Searches for a polynomial Lyapunov function of x' = f(x).
 * Request: {"states": ["x1","x2"], "field": ["-x1^3", "-x2"],
 *           "degree": 2, "eps": 1e-6, "digits": 5, ...solver options}
 * Result: {"found": true, "lyapunov": "..."}.
 * Returns SUMSQ_OK when found, SUMSQ_NONE when the search program is
 * infeasible. */
int sumsq_findlyap(const char* request_json, char** result_json);

/* Lower bound on a polynomial, optionally over a semialgebraic set.
 * Request: {"variables": [...], "objective": "...",
 *           "inequalities": [...], "equalities": [...], "degree": 4,
 *           ...solver options}
 * Without constraints the degree is ignored and the plain relaxation
 * runs. Result: {"bound": v, "minimizer": {"x": ..} | null}.
 * Returns SUMSQ_NONE when the relaxation is unbounded below. */
int sumsq_findbound(const char* request_json, char** result_json);

/* Runs one of the ten worked examples (1..10).
 * Options (all optional): {"tol", "max_iter", "digits", "m" (example 4),
 *  "gamma" (examples 5 and 6), "bisect" (example 5), "n" (example 7),
 *  "allow_large_n"}
 * Result: {"id", "feasible", "verified", "lines": [...],
 *          "values": {...}, "polys": {...}}.
 * Returns SUMSQ_OK when the example's self-check passes. */
int sumsq_run_demo(int id, const char* options_json, char** result_json);

/* Solves a serialized program (see sumsq_program_serialize for the
 * document layout). Options: {"tol", "max_iter"}.
 * Result: {"status": "feasible"|"infeasible"|"unbounded", "feasible",
 *          "objective": v|null, "decision": {name: value},
 *          "iterations", "gap", "residual", "feasratio",
 *          "warnings": [...]}.
 * Returns SUMSQ_OK for feasible or unbounded programs, SUMSQ_NONE for
 * infeasible ones, SUMSQ_ERROR when the solver breaks down. */
int sumsq_solve_json(const char* program_json, const char* options_json,
                     char** result_json);

/* Compiles a serialized program and writes the SDP in SDPA sparse
 * format (.dat-s). */
int sumsq_export_sdpa(const char* program_json, char** sdpa_text);

/* Handle interface over the same program documents. */
typedef struct sumsq_program sumsq_program;

/* Returns null on error (see sumsq_last_error). */
sumsq_program* sumsq_program_parse(const char* program_json);
void sumsq_program_free(sumsq_program* prog);

/* Same contract as sumsq_solve_json. */
int sumsq_program_solve(sumsq_program* prog, const char* options_json,
                        char** result_json);
int sumsq_program_serialize(const sumsq_program* prog, char** program_json);
int sumsq_program_export_sdpa(const sumsq_program* prog, char** sdpa_text);

#ifdef __cplusplus
}
#endif

#endif /* SUMSQ_H */
