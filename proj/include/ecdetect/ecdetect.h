// Copyright 2026 The ecdetect Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// C interface to the ecdetect library.
//
// Every function returns an ecd_status. On failure, ecd_last_error() returns
// a message describing the most recent error on the calling thread. Strings
// returned through out-parameters are owned by the library and stay valid
// until the owning handle is freed or the same call is made again on it.

#ifndef ECDETECT_ECDETECT_H_
#define ECDETECT_ECDETECT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ECDETECT_BUILDING_LIBRARY)
#define ECD_API __declspec(dllexport)
#else
#define ECD_API __declspec(dllimport)
#endif
#else
#define ECD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ecd_status {
  ECD_OK = 0,
  ECD_INVALID_ARGUMENT = 1,
  ECD_IO = 2,
  ECD_PARSE = 3,
  ECD_DEGENERATE = 4,
  ECD_INTERNAL = 5,
} ecd_status;

// Label values used in label arrays.
enum { ECD_LABEL_CONTENT = 0, ECD_LABEL_EC = 1 };

typedef struct ecd_pipeline ecd_pipeline;
typedef struct ecd_classifier ecd_classifier;

ECD_API const char* ecd_version(void);
ECD_API const char* ecd_status_name(ecd_status status);
ECD_API const char* ecd_last_error(void);

// Pipeline stages ----------------------------------------------------------

// config_json may be NULL or empty for defaults.
ECD_API ecd_status ecd_pipeline_create(const char* config_json,
                                       ecd_pipeline** out);
ECD_API void ecd_pipeline_free(ecd_pipeline* pipeline);

// Resolved configuration as JSON.
ECD_API ecd_status ecd_pipeline_config(ecd_pipeline* pipeline,
                                       const char** out_json);

// Runs one of: dips, segment, label, train, predict, decode, silver, eval,
// rouge, synth.
ECD_API ecd_status ecd_pipeline_run(ecd_pipeline* pipeline,
                                    const char* command);

// JSON summary of the last successful run.
ECD_API ecd_status ecd_pipeline_summary(ecd_pipeline* pipeline,
                                        const char** out_json);

// Trained classifiers ------------------------------------------------------

ECD_API ecd_status ecd_classifier_load(const char* path, ecd_classifier** out);
ECD_API void ecd_classifier_free(ecd_classifier* classifier);

// Probability that one sentence is extraneous content.
ECD_API ecd_status ecd_classifier_predict(const ecd_classifier* classifier,
                                          const char* sentence,
                                          double* out_prob);

// Probabilities for n consecutive sentences of one document, using the
// preceding sentence as context when the model was trained with it.
ECD_API ecd_status ecd_classifier_predict_document(
    const ecd_classifier* classifier, const char* const* sentences, size_t n,
    double* out_probs);

// Numeric routines ---------------------------------------------------------

// out_tau is 0 when no change point is accepted; out_best_tau always holds
// the maximiser of the statistic. Any out pointer except out_tau may be NULL.
ECD_API ecd_status ecd_detect_change_point(const double* probs, size_t n,
                                           double min_llr, size_t* out_tau,
                                           size_t* out_best_tau,
                                           double* out_llr);

ECD_API ecd_status ecd_smooth(const double* probs, size_t n, double bandwidth,
                              double* out);

ECD_API ecd_status ecd_decode_transcript(const double* probs, size_t n,
                                         double bandwidth, double threshold,
                                         int* out_labels);

ECD_API ecd_status ecd_decode_description(const double* probs, size_t n,
                                          double min_llr, int* out_labels);

ECD_API ecd_status ecd_rouge_l(const char* candidate, const char* reference,
                               double beta, double* out_recall,
                               double* out_precision, double* out_f);

// Writes up to capacity peak positions (seconds) and stores the total count
// in out_count.
ECD_API ecd_status ecd_find_dip_peaks(const double* retention, size_t n,
                                      double min_prominence,
                                      size_t min_distance_s, size_t* out_peaks,
                                      size_t capacity, size_t* out_count);

ECD_API ecd_status ecd_estimate_dip_bounds(const double* retention, size_t n,
                                           size_t peak_s, size_t window_s,
                                           double* out_start_s,
                                           double* out_end_s,
                                           int* out_recovered);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // ECDETECT_ECDETECT_H_
