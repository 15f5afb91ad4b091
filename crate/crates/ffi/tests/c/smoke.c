#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mediatrix.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);      \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  MdxSurface *s = NULL;
  CHECK(mdx_surface_builtin("sphere", 0.2, &s) == MDX_STATUS_OK);
  int64_t chi = 0;
  CHECK(mdx_surface_euler_characteristic(s, &chi) == MDX_STATUS_OK && chi == 2);
  CHECK(mdx_surface_vertex_count(s) > 0);
  int pass = 0;
  CHECK(mdx_surface_validate(s, 1e-9, &pass, NULL) == MDX_STATUS_OK && pass == 1);
  mdx_surface_free(s);

  CHECK(mdx_surface_builtin("klein", 0.2, &s) == MDX_STATUS_PARSE);
  CHECK(strstr(mdx_last_error_message(), "klein") != NULL);

  char *roots = NULL;
  CHECK(mdx_line_equidistant("d2", 2.0, -2.0, -10.0, 10.0, 1e-4, &roots) == MDX_STATUS_OK);
  CHECK(strstr(roots, "interval") != NULL);
  mdx_string_free(roots);

  char *report = NULL;
  CHECK(mdx_run_builtin_scene("line-d1", &report, &pass) == MDX_STATUS_OK && pass == 1);
  mdx_string_free(report);
  printf("ok %s\n", mdx_version());
  return 0;
}
