#include <stdio.h>
#include <string.h>

#include "klpadic.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      const char *msg = kl_last_error_message();                      \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,          \
              msg ? msg : "no error message");                        \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  char *s = NULL;
  CHECK(kl_bernoulli(12, &s) == KL_STATUS_OK);
  CHECK(strcmp(s, "-691/2730") == 0);
  kl_string_free(s);

  KlCharacter *chi = NULL;
  CHECK(kl_character_from_spec(5, "omega^2", 8, &chi) == KL_STATUS_OK);
  bool even = false;
  CHECK(kl_character_is_even(chi, &even) == KL_STATUS_OK && even);

  KlLpParams params = {.p = 5, .d = 1, .c = 2, .m = 1, .prec = 8,
                       .j_min = 0, .j_max = 7, .target = 4};
  CHECK(kl_verify_json(&params, chi, 2, &s) == KL_STATUS_OK);
  CHECK(strstr(s, "\"pass\":true") != NULL);
  kl_string_free(s);
  kl_character_free(chi);

  KlCharacter *bad = NULL;
  CHECK(kl_character_from_spec(5, "omega", 8, &bad) == KL_STATUS_PARSE);
  CHECK(bad == NULL && kl_last_error_message() != NULL);

  KlPadic *x = NULL, *y = NULL, *z = NULL;
  CHECK(kl_padic_from_rational(5, "25", "3", 6, &x) == KL_STATUS_OK);
  CHECK(kl_padic_from_rational(5, "2", "1", 6, &y) == KL_STATUS_OK);
  CHECK(kl_padic_mul(x, y, &z) == KL_STATUS_OK);
  int64_t v = 0;
  bool exact = false;
  CHECK(kl_padic_valuation(z, &v, &exact) == KL_STATUS_OK);
  CHECK(v == 2 && exact);
  kl_padic_free(x);
  kl_padic_free(y);
  kl_padic_free(z);

  puts("ok");
  return 0;
}
