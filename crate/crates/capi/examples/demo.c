/* Minimal C consumer: half-moons, label-aware affinity, spectral clustering.
 *
 * Build (from the workspace root, after `cargo build --release -p lapssl-capi`):
 *   cc crates/capi/examples/demo.c -Icrates/capi/include \
 *      -Ltarget/release -llapssl_capi -lm -o demo
 *   LD_LIBRARY_PATH=target/release ./demo
 */
#include <stdio.h>
#include <stdlib.h>
#include <lapssl.h>

static void check(LapsslStatus status, const char *what) {
    if (status != LAPSSL_STATUS_OK) {
        char msg[256];
        lapssl_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)status, msg);
        exit(1);
    }
}

int main(void) {
    LapsslDataset *data = NULL;
    check(lapssl_dataset_moons(300, 2, 0.08, 7, &data), "moons");
    size_t n = lapssl_dataset_len(data);

    uint32_t *truth = malloc(n * sizeof *truth);
    check(lapssl_dataset_labels(data, truth), "labels");

    LapsslAffinity *w = NULL;
    check(lapssl_affinity_build(data, 0.2, 8, &w), "affinity");

    /* three labels per moon */
    uint32_t indices[6];
    uint32_t sizes[2] = {3, 3};
    size_t filled0 = 0, filled1 = 0;
    for (size_t i = 0; i < n && (filled0 < 3 || filled1 < 3); i++) {
        if (truth[i] == 0 && filled0 < 3) indices[filled0++] = (uint32_t)i;
        if (truth[i] == 1 && filled1 < 3) indices[3 + filled1++] = (uint32_t)i;
    }
    LapsslLabeledSet *labeled = NULL;
    check(lapssl_labeled_set_new(n, indices, sizes, 2, &labeled), "labeled set");

    double mu, alpha;
    check(lapssl_default_weights(n, 6, &mu, &alpha), "weights");

    LapsslAffinity *ssl = NULL;
    check(lapssl_affinity_ssl(w, labeled, mu, alpha, &ssl), "ssl affinity");

    uint32_t *pred = malloc(n * sizeof *pred);
    check(lapssl_spectral_cluster(ssl, 2, 0, 9, 10, pred), "spectral");

    double nmi, acc;
    check(lapssl_evaluate(truth, pred, n, &nmi, &acc), "evaluate");
    printf("spectral clustering with labels: nmi=%.3f acc=%.3f\n", nmi, acc);

    lapssl_labeled_set_free(labeled);
    lapssl_affinity_free(ssl);
    lapssl_affinity_free(w);
    lapssl_dataset_free(data);
    free(truth);
    free(pred);
    return 0;
}
