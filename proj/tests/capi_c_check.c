/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

/* The public header must compile and link as plain C. */

#include "evidencer/evidencer.h"

#include <math.h>
#include <stdio.h>

int main(void) {
    const double lme[2] = {1.0, 0.0};
    double pp[2] = {0.0, 0.0};
    const double alpha[2] = {2.0, 1.0};
    double ep[2] = {0.0, 0.0};

    if (evd_posterior_probabilities(lme, 2, 1, NULL, pp) != EVD_OK) {
        fprintf(stderr, "posterior probabilities failed: %s\n", evd_last_error());
        return 1;
    }
    if (fabs(pp[0] - 1.0 / (1.0 + exp(-1.0))) > 1e-14) return 1;

    if (evd_exceedance_probabilities(alpha, 2, 1, EVD_EP_CLOSED_FORM, 0, 0, ep, NULL) != EVD_OK) return 1;
    if (fabs(ep[0] - 0.75) > 1e-14) return 1;

    if (evd_posterior_probabilities(NULL, 2, 1, NULL, pp) != EVD_ERR_INVALID_ARGUMENT) return 1;
    printf("evidencer %s C interface ok\n", evd_version());
    return 0;
}
