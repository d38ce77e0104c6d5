/* C interface to the flexbc solver library.
 *
 * A context wraps one JSON experiment configuration. Commands return process
 * exit codes: 0 success, 1 validation failure, 2 configuration error,
 * 3 numerical abort. Returned strings are owned by the context and stay
 * valid until the next call on the same context or its destruction.
 */
#ifndef FLEXBC_H
#define FLEXBC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct flexbc_context flexbc_context;

#define FLEXBC_OK 0
#define FLEXBC_CHECK_FAILED 1
#define FLEXBC_CONFIG_ERROR 2
#define FLEXBC_NUMERICAL_ERROR 3

/* Creates a context from a JSON configuration document ("{}" for defaults).
 * Returns NULL on error; if errbuf is non-NULL the message is copied into it
 * (truncated to errbuf_len - 1 characters). */
flexbc_context* flexbc_create(const char* config_json, char* errbuf, size_t errbuf_len);

void flexbc_destroy(flexbc_context* ctx);

/* Applies dotted-key overrides ("schedule.m=5") to the stored config.
 * Returns FLEXBC_OK or FLEXBC_CONFIG_ERROR. */
int flexbc_apply_overrides(flexbc_context* ctx, const char* const* overrides,
                           size_t count);

/* Runs one subcommand: "run", "compare", "degrade", "validate" or
 * "equivalence". quiet != 0 suppresses console output. Returns the exit
 * code. */
int flexbc_execute(flexbc_context* ctx, const char* subcommand, int quiet);

/* JSON report of the most recent flexbc_execute call; NULL before any call. */
const char* flexbc_report(const flexbc_context* ctx);

/* Fully resolved configuration (defaults filled in) as JSON, or NULL on a
 * config error. */
const char* flexbc_resolved_config(flexbc_context* ctx);

/* Message of the most recent error on this context, or NULL. */
const char* flexbc_last_error(const flexbc_context* ctx);

const char* flexbc_version(void);

#ifdef __cplusplus
}
#endif

#endif /* FLEXBC_H */
