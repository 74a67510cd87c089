/* C ABI for the topicpath engine.
 *
 * Incremental topic-pathway separation and event detection for timestamped
 * short-text streams. Typical use:
 *
 *   TpEngine *engine = NULL;
 *   if (tp_engine_new(NULL, &engine) != TP_OK) { ... tp_last_error() ... }
 *   tp_engine_feed_json(engine, "{\"id\":\"1\",\"timestamp\":0,\"text\":\"...\"}");
 *   ...
 *   tp_engine_process(engine);
 *   tp_engine_write_reports(engine, "out/");
 *   tp_engine_save_snapshot(engine, "run.snapshot");
 *   tp_engine_free(engine);
 *
 * Handles are not thread-safe; use each handle from one thread at a time.
 * All strings are NUL-terminated UTF-8.
 */

#ifndef TOPICPATH_H
#define TOPICPATH_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Opaque engine handle. */
typedef struct TpEngine TpEngine;

/* Status codes returned by fallible functions. */
enum {
    TP_OK = 0,
    TP_ERR_CONFIG = 1,
    TP_ERR_IO = 2,
    TP_ERR_INVALID_ARGUMENT = 3,
    TP_ERR_RUNTIME = 4
};

/* Creates an engine from a flat key-value config file; pass NULL for the
 * built-in defaults. On success writes the handle to *out. */
int32_t tp_engine_new(const char *config_path, TpEngine **out);

/* As tp_engine_new, overriding the RNG seed. */
int32_t tp_engine_new_seeded(const char *config_path, uint64_t seed, TpEngine **out);

/* Restores an engine from a snapshot file written by
 * tp_engine_save_snapshot. */
int32_t tp_engine_from_snapshot(const char *path, TpEngine **out);

/* Buffers one JSON message object with fields id (string), timestamp
 * (integer epoch seconds or RFC-3339 string) and text (string). Malformed
 * lines return TP_ERR_INVALID_ARGUMENT and are counted, but do not poison
 * the handle. Blank lines are ignored. */
int32_t tp_engine_feed_json(TpEngine *engine, const char *json_line);

/* Segments the buffered messages into time batches and processes every
 * batch beyond the last processed one, in order. Clears the buffer. */
int32_t tp_engine_process(TpEngine *engine);

/* Writes pathways.json, events.csv, coherence.csv and
 * segments/<pathway>/<batch>.terms.csv into out_dir. */
int32_t tp_engine_write_reports(TpEngine *engine, const char *out_dir);

/* Saves a resumable snapshot of the full engine state. */
int32_t tp_engine_save_snapshot(const TpEngine *engine, const char *path);

/* Scores one raw message with the engine's sentiment lexicon.
 * *pos receives 1..4, *neg receives -4..-1. */
int32_t tp_engine_score_message(const TpEngine *engine, const char *text,
                                int32_t *pos, int32_t *neg);

/* Index of the last processed batch, or -1 when nothing was processed. */
int64_t tp_engine_last_batch(const TpEngine *engine);

/* Number of topic pathways discovered so far. */
uint64_t tp_engine_pathway_count(const TpEngine *engine);

/* Messages rejected by tp_engine_feed_json so far. */
uint64_t tp_engine_skipped_messages(const TpEngine *engine);

/* Last error message on the calling thread; empty string until a call
 * fails. Valid until the next failing call on the same thread. */
const char *tp_last_error(void);

/* Frees a handle; NULL is a no-op. */
void tp_engine_free(TpEngine *engine);

/* Library version string. */
const char *tp_version(void);

#ifdef __cplusplus
}
#endif

#endif /* TOPICPATH_H */
