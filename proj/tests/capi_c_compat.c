/* Compiled as C: the public header must not depend on C++. */
#include <stdio.h>

#include "bsq/bsq.h"

int main(void) {
  const char* src[] = {"xi^2 + x^2"};
  bsq_problem* p = NULL;
  bsq_actions a;
  if (bsq_problem_create(src, 1, 0.0, 1.0, 0.5, 1.5, NULL, &p) != BSQ_OK) return 1;
  if (bsq_actions_at(p, 1.0, &a) != BSQ_OK) return 1;
  printf("S0(1) = %.15g\n", a.S0);
  bsq_problem_destroy(p);
  return a.S0 > 3.14159 && a.S0 < 3.1416 ? 0 : 1;
}
