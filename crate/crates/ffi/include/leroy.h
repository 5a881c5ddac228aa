/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef LEROY_H
#define LEROY_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes. `LEROY_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum LeroyStatus {
  LEROY_STATUS_OK = 0,
  LEROY_STATUS_NULL_POINTER = 1,
  LEROY_STATUS_DOMAIN = 2,
  LEROY_STATUS_PRECONDITION = 3,
  LEROY_STATUS_ORDER_CAP = 4,
  LEROY_STATUS_CANCELLATION_CAP = 5,
  LEROY_STATUS_QUADRATURE = 6,
  LEROY_STATUS_BRACKET = 7,
  LEROY_STATUS_NON_MONOTONE = 8,
  LEROY_STATUS_PRECISION = 9,
  LEROY_STATUS_BUFFER_TOO_SMALL = 10,
  LEROY_STATUS_OUT_OF_RANGE = 11,
  LEROY_STATUS_PANIC = 12,
} LeroyStatus;

typedef enum LeroyCmStatus {
  LEROY_CM_STATUS_CM = 0,
  LEROY_CM_STATUS_NOT_CM = 1,
  LEROY_CM_STATUS_CM_BY_SUFFICIENCY = 2,
  LEROY_CM_STATUS_OPEN_REGION = 3,
} LeroyCmStatus;

typedef enum LeroyClause {
  LEROY_CLAUSE_THEOREM_A = 0,
  LEROY_CLAUSE_THEOREM_B_SUFF = 1,
  LEROY_CLAUSE_THEOREM_B_NEC = 2,
  LEROY_CLAUSE_THEOREM_C = 3,
  LEROY_CLAUSE_CRITERION_SUFFICIENT = 4,
  LEROY_CLAUSE_STIRLING_DEGENERATE = 5,
} LeroyClause;

/**
 * Where `sup g` is attained; `argmax_z` is meaningful for `Interior` only.
 */
typedef enum LeroyArgmax {
  LEROY_ARGMAX_INTERIOR = 0,
  LEROY_ARGMAX_LOWER_END = 1,
  LEROY_ARGMAX_UPPER_END = 2,
} LeroyArgmax;

typedef enum LeroyPattern {
  LEROY_PATTERN_NON_POSITIVE = 0,
  LEROY_PATTERN_NEG_THEN_POS = 1,
  LEROY_PATTERN_NEG_POS_NEG = 2,
  LEROY_PATTERN_OTHER = 3,
} LeroyPattern;

typedef enum LeroyLimitKind {
  LEROY_LIMIT_KIND_FINITE = 0,
  LEROY_LIMIT_KIND_PLUS_INFINITY = 1,
  LEROY_LIMIT_KIND_MINUS_INFINITY = 2,
} LeroyLimitKind;

/**
 * Opaque: a sampled boundary curve.
 */
typedef struct LeroyBoundaryCurve LeroyBoundaryCurve;

/**
 * Opaque: working precision plus the last error message.
 */
typedef struct LeroyContext LeroyContext;

typedef struct LeroyVerdict {
  enum LeroyCmStatus status;
  enum LeroyClause clause;
} LeroyVerdict;

typedef struct LeroyCriterion {
  bool holds;
  bool marginal;
  /**
   * `sup g` rounded to double; `+inf` when `β < α`.
   */
  double sup_g;
  enum LeroyArgmax argmax;
  double argmax_z;
  enum LeroyPattern pattern;
  enum LeroyLimitKind zero_limit_kind;
  double zero_limit;
  size_t n_critical_points;
  size_t n_sign_changes;
  double tolerance;
} LeroyCriterion;

typedef struct LeroyLevyExponent {
  double value;
  double drift;
  double integral;
  double error;
} LeroyLevyExponent;

/**
 * Summary of a Hankel run. `violation_family` is 0 for H0, 1 for H1 and
 * -1 when there is no violation.
 */
typedef struct LeroyHankel {
  bool all_nonnegative;
  int32_t violation_family;
  int32_t violation_k;
  uint32_t digits_used;
} LeroyHankel;

typedef struct LeroyGammaRatioCheck {
  bool holds;
  bool balance;
  bool shift;
  bool scale;
  bool half_shift;
} LeroyGammaRatioCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a context working at `digits` significant decimal digits
 * (at least 16). On failure `*out` is set to NULL.
 */
enum LeroyStatus leroy_context_new(uint32_t digits, struct LeroyContext **out);

void leroy_context_free(struct LeroyContext *ctx);

uint32_t leroy_context_digits(const struct LeroyContext *ctx);

/**
 * Message of the last failure on `ctx`, or "" after a success. Owned by
 * the context and valid until the next call on it.
 */
const char *leroy_last_error(const struct LeroyContext *ctx);

/**
 * Static name of a status code, e.g. "DOMAIN".
 */
const char *leroy_status_name(enum LeroyStatus status);

const char *leroy_version(void);

/**
 * `k`-th derivative of `F` at real `z`, rounded to double, with its
 * absolute error bound.
 */
enum LeroyStatus leroy_eval(struct LeroyContext *ctx,
                            double alpha,
                            double beta,
                            double gamma,
                            double z,
                            uint32_t order,
                            double *value,
                            double *tail_bound);

/**
 * As [`leroy_eval`], but writes the value as a NUL-terminated decimal
 * string with the context's digits into `buf`. `*needed` receives the
 * required buffer size including the terminator; if `len` is smaller the
 * call returns `BufferTooSmall` and leaves `buf` alone.
 */
enum LeroyStatus leroy_eval_string(struct LeroyContext *ctx,
                                   double alpha,
                                   double beta,
                                   double gamma,
                                   double z,
                                   uint32_t order,
                                   char *buf,
                                   size_t len,
                                   size_t *needed);

enum LeroyStatus leroy_classify(struct LeroyContext *ctx,
                                double alpha,
                                double beta,
                                double gamma,
                                struct LeroyVerdict *out);

enum LeroyStatus leroy_criterion(struct LeroyContext *ctx,
                                 double alpha,
                                 double beta,
                                 double gamma,
                                 struct LeroyCriterion *out);

/**
 * `ln E[X^n]`.
 */
enum LeroyStatus leroy_ln_moment(struct LeroyContext *ctx,
                                 double alpha,
                                 double beta,
                                 double gamma,
                                 uint64_t n,
                                 double *out);

/**
 * `ln E[X^s]` in closed form, `s > -1`.
 */
enum LeroyStatus leroy_ln_mellin(struct LeroyContext *ctx,
                                 double alpha,
                                 double beta,
                                 double gamma,
                                 double s,
                                 double *out);

/**
 * Lévy-Khintchine exponent at `s > 0` by quadrature.
 */
enum LeroyStatus leroy_levy_exponent(struct LeroyContext *ctx,
                                     double alpha,
                                     double beta,
                                     double gamma,
                                     double s,
                                     struct LeroyLevyExponent *out);

enum LeroyStatus leroy_hankel(struct LeroyContext *ctx,
                              double alpha,
                              double beta,
                              double gamma,
                              uint32_t order,
                              struct LeroyHankel *out);

enum LeroyStatus leroy_gamma_ratio_check(struct LeroyContext *ctx,
                                         double A,
                                         double a,
                                         double B,
                                         double b,
                                         double theta,
                                         double alpha_exp,
                                         double beta_exp,
                                         struct LeroyGammaRatioCheck *out);

/**
 * Bernstein property of `ψ(Ax+a) - ψ(Bx+b)`.
 */
enum LeroyStatus leroy_digamma_bernstein(struct LeroyContext *ctx,
                                         double A,
                                         double a,
                                         double B,
                                         double b,
                                         bool *out);

/**
 * Traces `β(α)` for fixed `γ > 1` on `n_points ≥ 8` samples.
 */
enum LeroyStatus leroy_boundary_trace(struct LeroyContext *ctx,
                                      double gamma,
                                      size_t n_points,
                                      struct LeroyBoundaryCurve **out);

void leroy_boundary_free(struct LeroyBoundaryCurve *curve);

/**
 * Number of samples, 0 for NULL.
 */
size_t leroy_boundary_len(const struct LeroyBoundaryCurve *curve);

bool leroy_boundary_ratio_monotone(const struct LeroyBoundaryCurve *curve);

enum LeroyStatus leroy_boundary_point(const struct LeroyBoundaryCurve *curve,
                                      size_t index,
                                      double *alpha,
                                      double *beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEROY_H */
