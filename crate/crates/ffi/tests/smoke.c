#include <stdio.h>
#include <string.h>
#include "carnot.h"

int main(void) {
    CarnotStructure *s = NULL;
    CarnotGroup *g = NULL;
    char *out = NULL;
    int ok = 0;
    if (carnot_structure_load("heisenberg3.json", &s) != CARNOT_STATUS_OK) return 1;
    if (carnot_structure_dim(s) != 3) return 2;
    if (carnot_structure_report(s, &ok, &out) != CARNOT_STATUS_OK || !ok) return 3;
    carnot_string_free(out);
    if (carnot_structure_tangent_group(s, "0,0,0", &g) != CARNOT_STATUS_OK) return 4;
    if (carnot_group_mul(g, "1,0,0", "0,1,0", &out) != CARNOT_STATUS_OK) return 5;
    printf("%s\n", out);
    carnot_string_free(out);
    if (carnot_group_mul(g, "1,0", "0,1,0", &out) != CARNOT_STATUS_SHAPE) return 6;
    printf("%s\n", carnot_last_error());
    carnot_group_free(g);
    carnot_structure_free(s);
    return 0;
}
