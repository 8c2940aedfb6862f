/*
 * Copyright 2026 The OncoRAG Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ONCORAG_ONCORAG_H
#define ONCORAG_ONCORAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define ONCORAG_API __declspec(dllexport)
#else
#  define ONCORAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oncorag_status {
    ONCORAG_OK = 0,
    ONCORAG_E_INVALID_ARGUMENT = 1,
    ONCORAG_E_NOT_FOUND = 2,
    ONCORAG_E_IO = 3,
    ONCORAG_E_PARSE = 4,
    ONCORAG_E_STATE = 5,
    ONCORAG_E_TRANSPORT = 6,
    ONCORAG_E_INTERNAL = 7
} oncorag_status;

/* Engine load flags. */
#define ONCORAG_LOAD_INDEX 0x1u
#define ONCORAG_LOAD_GRAPH 0x2u
#define ONCORAG_LOAD_EMBEDDINGS 0x4u
#define ONCORAG_LOAD_GENERATOR 0x8u

typedef struct oncorag_config oncorag_config;
typedef struct oncorag_engine oncorag_engine;

/* Message of the last failed call on this thread; "" when none. */
ONCORAG_API const char* oncorag_last_error(void);
ONCORAG_API const char* oncorag_status_name(oncorag_status status);
/* Releases strings returned through char** out-parameters. */
ONCORAG_API void oncorag_free(char* str);

ONCORAG_API oncorag_status oncorag_config_new(oncorag_config** out);
ONCORAG_API void oncorag_config_free(oncorag_config* config);
ONCORAG_API oncorag_status oncorag_config_load_file(oncorag_config* config, const char* path);
/* Applies ONCORAG_<KEY> environment overrides. */
ONCORAG_API oncorag_status oncorag_config_apply_env(oncorag_config* config);
ONCORAG_API oncorag_status oncorag_config_set(oncorag_config* config, const char* key, const char* value);
ONCORAG_API oncorag_status oncorag_config_get(const oncorag_config* config, const char* key, char** out);
ONCORAG_API oncorag_status oncorag_config_to_json(const oncorag_config* config, char** out_json);

/* The engine copies the config; later changes to it have no effect. */
ONCORAG_API oncorag_status oncorag_engine_open(const oncorag_config* config, unsigned flags, oncorag_engine** out);
ONCORAG_API void oncorag_engine_close(oncorag_engine* engine);
/* Reloads every artifact named by the open flags and swaps it in atomically. */
ONCORAG_API oncorag_status oncorag_engine_reload(oncorag_engine* engine);

/* All results below are JSON documents owned by the caller. */
ONCORAG_API oncorag_status oncorag_ingest(const oncorag_engine* engine, const char* input, const char* output,
                                          char** out_json);
ONCORAG_API oncorag_status oncorag_chunk(const oncorag_engine* engine, const char* documents, const char* output,
                                         char** out_json);
ONCORAG_API oncorag_status oncorag_index_build(const oncorag_engine* engine, const char* chunks, const char* index,
                                               char** out_json);
/* output may be NULL to validate only. */
ONCORAG_API oncorag_status oncorag_kg_load(const oncorag_engine* engine, const char* tsv, const char* output,
                                           char** out_json);
/* output NULL means the configured embeddings_path. */
ONCORAG_API oncorag_status oncorag_kg_train(const oncorag_engine* engine, const char* output, char** out_json);
/* m == 0 means the configured link_candidates. */
ONCORAG_API oncorag_status oncorag_kg_link(const oncorag_engine* engine, const char* mention, size_t m,
                                           char** out_json);
ONCORAG_API oncorag_status oncorag_query(const oncorag_engine* engine, const char* request_json, char** out_json);
ONCORAG_API oncorag_status oncorag_answer(const oncorag_engine* engine, const char* request_json, char** out_json);
/* inputs_json: JSON array of file paths. */
ONCORAG_API oncorag_status oncorag_dataset_build(const oncorag_engine* engine, const char* inputs_json,
                                                 const char* task, const char* language, const char* output,
                                                 char** out_json);
ONCORAG_API oncorag_status oncorag_dataset_sample(const oncorag_engine* engine, const char* input, size_t n,
                                                  const char* language, const char* output, char** out_json);
ONCORAG_API oncorag_status oncorag_eval_run(const oncorag_engine* engine, const char* experiment_json,
                                            char** out_json);
/* reports_json: JSON array of reports from oncorag_eval_run. */
ONCORAG_API oncorag_status oncorag_reports_csv(const char* reports_json, char** out_csv);
ONCORAG_API oncorag_status oncorag_health(const oncorag_engine* engine, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
