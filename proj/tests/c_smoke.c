/*
 * Copyright 2026 The SaeSplade Authors.
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

/* The public header must be usable from C. */

#include <stdio.h>
#include <string.h>

#include "saesplade/saesplade.h"

int main(void) {
  ssp_corpus* c = NULL;
  double v = 0.0;
  const double row[] = {1.0, 0.0};
  if (ssp_corpus_create(2, &c) != SSP_OK) return 1;
  if (ssp_corpus_add(c, "d", 1, row, NULL) != SSP_OK) return 2;
  if (ssp_corpus_size(c) != 1) return 3;
  ssp_corpus_free(c);
  if (ssp_delta_e2(0.387, 1.40, 0.183, 0.13, NULL, &v) != SSP_OK) return 4;
  if (v < 19.05 || v > 19.15) return 5;
  if (ssp_corpus_load("/nonexistent", &c) != SSP_ERR_IO) return 6;
  if (strlen(ssp_last_error()) == 0) return 7;
  printf("ok %s\n", ssp_version());
  return 0;
}
