/* C interface to the rule status engine. */

#ifndef RULE_STATUS_H
#define RULE_STATUS_H

/* Generated by cbindgen from src/lib.rs; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * The call succeeded.
 */
#define RSA_OK 0

/**
 * A pointer was null, a string was not UTF-8, or a number was out of range.
 */
#define RSA_ERR_ARGUMENT -1

/**
 * A file could not be read, parsed, or validated.
 */
#define RSA_ERR_INPUT -2

/**
 * The session is fine but the question is not: bad node address or a time
 * outside the trace.
 */
#define RSA_ERR_QUERY -3

/**
 * The engine panicked; the session may be in an unknown state.
 */
#define RSA_ERR_PANIC -4

/**
 * Rules assessed against one trace. Opaque to C.
 */
typedef struct RsaSession RsaSession;

/**
 * A trace time step. Matches the engine's time type.
 */
typedef int64_t Time;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a session from a rules file and a trace JSON file.
 *
 * On success writes the new session to `out_session` and returns
 * [`RSA_OK`]. The session must be released with [`rsa_session_free`].
 *
 * # Safety
 *
 * `rules_path` and `trace_path` must be NUL-terminated strings and
 * `out_session` must point at writable memory.
 */
int32_t rsa_session_new_from_files(const char *rules_path,
                                   const char *trace_path,
                                   struct RsaSession **out_session);

/**
 * Create a session from a rules file plus a Kripke structure and a run
 * through it; the trace is induced from the run and starts at
 * `start_time`.
 *
 * # Safety
 *
 * The three paths must be NUL-terminated strings and `out_session` must
 * point at writable memory.
 */
int32_t rsa_session_new_from_kripke(const char *rules_path,
                                    const char *kripke_path,
                                    const char *run_path,
                                    Time start_time,
                                    struct RsaSession **out_session);

/**
 * Release a session. A null pointer is a no-op.
 *
 * # Safety
 *
 * `session` must be null or a pointer from one of the constructors, and
 * must not be used after this call.
 */
void rsa_session_free(struct RsaSession *session);

/**
 * Number of rules in the session; 0 if `session` is null.
 *
 * # Safety
 *
 * `session` must be null or a live session pointer.
 */
size_t rsa_session_rule_count(const struct RsaSession *session);

/**
 * First and last time of the session's trace, the legal window for query
 * times.
 *
 * # Safety
 *
 * `session` must be a live session pointer; `out_start` and `out_end`
 * must be null or writable.
 */
int32_t rsa_session_time_range(const struct RsaSession *session, Time *out_start, Time *out_end);

/**
 * Status of one rule node at time `t`, read from the suffix starting at
 * `t0`. `node` is a dotted child path such as "1.2"; the empty string
 * names the root. On success writes a JSON object (fields `rule`, `node`,
 * `t0`, `t`, `status`, `text`) to `out_json`.
 *
 * # Safety
 *
 * `session` must be a live session pointer, `node` a NUL-terminated
 * string, and `out_json` writable.
 */
int32_t rsa_query(const struct RsaSession *session,
                  size_t rule,
                  const char *node,
                  Time t0,
                  Time t,
                  char **out_json);

/**
 * Suffix starts worth a look for one rule node: every time its own-suffix
 * status enters active or violated. Writes a JSON array of times.
 *
 * # Safety
 *
 * Same contract as [`rsa_query`].
 */
int32_t rsa_interesting_times(const struct RsaSession *session,
                              size_t rule,
                              const char *node,
                              char **out_json);

/**
 * Ask every always-rule what its body is doing at instant `t`. With
 * `only_satisfied`, hits are restricted to satisfied bodies. Writes a
 * JSON array: `{"kind": "hit", "result": {...}}` per reported body and
 * `{"kind": "skipped_non_global", "rule": n}` per rule the scan cannot
 * cover.
 *
 * # Safety
 *
 * `session` must be a live session pointer and `out_json` writable.
 */
int32_t rsa_scan(const struct RsaSession *session, Time t, bool only_satisfied, char **out_json);

/**
 * Message for the most recent failure on this thread, or null if there
 * has been none. The pointer stays valid until the next failing call on
 * the same thread; do not free it.
 *
 * # Safety
 *
 * Only the validity window above.
 */
const char *rsa_last_error(void);

/**
 * Release a string returned through an `out` parameter. A null pointer is
 * a no-op.
 *
 * # Safety
 *
 * `s` must be null or a pointer this library handed out, and must not be
 * used after this call.
 */
void rsa_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RULE_STATUS_H */
