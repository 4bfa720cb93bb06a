#include <math.h>
#include <stdio.h>
#include "equichan.h"

int main(void) {
    EqChannel *ch = NULL;
    if (eq_channel_new_unitary(2, -0.4, &ch) != EQ_STATUS_OK) return 1;
    double x_re[4] = {0, 1, 0, 0}, x_im[4] = {0, 0, 0, 0}, y_re[4], y_im[4];
    if (eq_channel_apply(ch, x_re, x_im, y_re, y_im) != EQ_STATUS_OK) return 2;
    if (fabs(y_re[1] + 0.4) > 1e-15) return 3;
    int member = -1;
    double margin = 0;
    if (eq_verdict_cp_u(2, -0.4, &member, &margin) != EQ_STATUS_OK || member != 0) return 4;
    char *json = NULL;
    if (eq_channel_to_json(ch, &json) != EQ_STATUS_OK) return 5;
    EqChannel *back = NULL;
    if (eq_channel_from_json(json, &back) != EQ_STATUS_OK) return 6;
    eq_string_free(json);
    if (eq_channel_from_json("{\"family\":", &back) != EQ_STATUS_INVALID_JSON) return 7;
    if (eq_last_error_message() == NULL) return 8;
    eq_channel_free(back);
    eq_channel_free(ch);
    puts("ok");
    return 0;
}
