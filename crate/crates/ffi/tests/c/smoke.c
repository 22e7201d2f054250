#include <math.h>
#include <stdio.h>
#include "ncphi4.h"

int main(void) {
    Ncphi4Graph *g = NULL;
    if (ncphi4_graph_catalog("tadpole_np", &g) != NCPHI4_STATUS_OK) return 1;
    Ncphi4Topology t;
    if (ncphi4_graph_topology(g, &t) != NCPHI4_STATUS_OK) return 2;
    if (t.genus != 0 || t.broken_faces != 2 || t.graph_class != NCPHI4_GRAPH_CLASS_PLANAR_IRREGULAR) return 3;
    Ncphi4Params p = ncphi4_params_default();
    Ncphi4Cutoff c = ncphi4_cutoff_full();
    Ncphi4Amplitude a;
    if (ncphi4_amplitude(g, 0.5, &p, &c, NCPHI4_METHOD_AUTO, 1e-8, 0, 0, &a) != NCPHI4_STATUS_OK) return 4;
    if (a.method != NCPHI4_METHOD_BESSEL1D || !(a.re > 0.0)) return 5;
    ncphi4_graph_free(g);

    if (ncphi4_graph_catalog("nope", &g) != NCPHI4_STATUS_GRAPH) return 6;
    char buf[256];
    if (ncphi4_last_error(buf, sizeof buf) == 0) return 7;
    printf("%s %.12g\n", ncphi4_version(), a.re);
    return 0;
}
