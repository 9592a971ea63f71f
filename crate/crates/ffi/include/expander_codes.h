#ifndef EXPANDER_CODES_H
#define EXPANDER_CODES_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_ARGUMENT = 2,
  TC_STATUS_IO = 3,
  TC_STATUS_PARSE = 4,
  TC_STATUS_TOO_LARGE = 5,
  TC_STATUS_INFEASIBLE = 6,
  TC_STATUS_DECODE_FAILURE = 7,
  TC_STATUS_NO_ACCEPTABLE_BRANCH = 8,
  TC_STATUS_SEARCH_BUDGET_EXHAUSTED = 9,
  TC_STATUS_ABORT = 10,
  TC_STATUS_PANIC = 11,
} TcStatus;

// A Tanner code.
typedef struct TcCode TcCode;

// Derived decoder constants.
typedef struct TcParams TcParams;

// Copies the last error message of this thread into `buf` (nul-terminated,
// truncated to `cap - 1` bytes) and returns its full length, or 0 if there
// is none.
//
// # Safety
// `buf` must be null or point to `cap` writable bytes.
size_t tc_last_error(char *buf, size_t cap);

// Loads a code from a `tanner v1` manifest.
//
// # Safety
// `path` must be a nul-terminated string and `out` a valid pointer.
enum TcStatus tc_code_load(const char *path, struct TcCode **out);

// Builds a code on a random `(c, d)`-biregular graph with `n` left vertices.
// `inner` names the inner code: `parity:D`, `rep:D`, `hamming7`,
// `ehamming8`, or a path to an inner-code file.
//
// # Safety
// `inner` must be a nul-terminated string and `out` a valid pointer.
enum TcStatus tc_code_new_random(size_t c,
                                 size_t d,
                                 size_t n,
                                 uint64_t graph_seed,
                                 const char *inner,
                                 struct TcCode **out);

// # Safety
// `code` must be null or a handle from this library not yet freed.
void tc_code_free(struct TcCode *code);

// Block length, or 0 for a null handle.
//
// # Safety
// `code` must be null or a live handle.
size_t tc_code_len(const struct TcCode *code);

// Minimum distance of the inner code, or 0 for a null handle.
//
// # Safety
// `code` must be null or a live handle.
size_t tc_code_inner_distance(const struct TcCode *code);

// Sets `*out` to whether `word` (length `len`) is a codeword.
//
// # Safety
// `code` must be a live handle, `word` must point to `len` bytes and `out`
// must be valid.
enum TcStatus tc_code_is_codeword(const struct TcCode *code,
                                  const uint8_t *word,
                                  size_t len,
                                  bool *out);

// Derives decoder constants for `code` under claimed `(alpha, delta)`
// expansion. `d0 == 0` uses the inner code's distance.
//
// # Safety
// `code` must be a live handle and `out` a valid pointer.
enum TcStatus tc_params_new(const struct TcCode *code,
                            double alpha,
                            double delta,
                            size_t d0,
                            struct TcParams **out);

// # Safety
// `params` must be null or a handle from this library not yet freed.
void tc_params_free(struct TcParams *params);

// Guaranteed decoding radius `gamma n`, or a negative value for a null handle.
//
// # Safety
// `params` must be null or a live handle.
double tc_params_gamma_n(const struct TcParams *params);

// Deterministic decoding of `word` into `out`, both of length `len`.
//
// # Safety
// Handles must be live; `word` and `out` must point to `len` bytes.
enum TcStatus tc_decode(const struct TcCode *code,
                        const struct TcParams *params,
                        const uint8_t *word,
                        size_t len,
                        uint8_t *out);

// Randomized decoding with the default iteration bound.
//
// # Safety
// Handles must be live; `word` and `out` must point to `len` bytes.
enum TcStatus tc_decode_rand(const struct TcCode *code,
                             const struct TcParams *params,
                             uint64_t seed,
                             const uint8_t *word,
                             size_t len,
                             uint8_t *out);

#endif  /* EXPANDER_CODES_H */
