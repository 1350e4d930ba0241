#include <stdio.h>
#include <string.h>
#include "beliefcast.h"

static const char *DOC =
    "{\"name\": \"coin\", \"nodes\": ["
    "{\"id\": \"c\", \"category\": \"annual\", \"period\": \"annual\", \"kind\": \"prior\","
    " \"dist\": {\"type\": \"categorical\", \"values\": [0, 1], \"probs\": [0.25, 0.75]}},"
    "{\"id\": \"y\", \"category\": \"price\", \"period\": \"annual\", \"kind\": \"deterministic\","
    " \"parents\": [\"c\"], \"expr\": \"10 + 8 * c\"}]}";

int main(void) {
    BcNetwork *net = NULL;
    BcRun *run = NULL;
    const char *targets[] = {"y"};
    double mean = 0.0;
    size_t count = 0;

    if (bc_network_from_json(DOC, &net) != BC_OK) {
        fprintf(stderr, "parse: %s\n", bc_last_error());
        return 1;
    }
    if (bc_simulate(net, targets, 1, 20000, 7, &run) != BC_OK) {
        fprintf(stderr, "simulate: %s\n", bc_last_error());
        return 1;
    }
    if (bc_run_mean(run, "y", &mean) != BC_OK || bc_run_samples(run, "y", NULL, 0, &count) != BC_OK) {
        fprintf(stderr, "read: %s\n", bc_last_error());
        return 1;
    }
    if (bc_run_mean(run, "nope", &mean) != BC_ERR_UNKNOWN_TARGET || bc_last_error() == NULL) {
        fprintf(stderr, "expected unknown target\n");
        return 1;
    }
    bc_run_mean(run, "y", &mean);
    printf("%s %zu %.3f\n", bc_version(), count, mean);
    bc_run_free(run);
    bc_network_free(net);
    return 0;
}
