#include <stdio.h>
#include "fcforge.h"

int main(void) {
    FcFamily *b = NULL;
    FcVerdict *v = NULL;
    FcVerdictKind kind;
    char *text = NULL;

    if (fcforge_close("n=5\n1,2,3\n1,2,4\n3,4,5\n", &b) != FC_STATUS_OK) {
        fprintf(stderr, "%s\n", fcforge_last_error());
        return 1;
    }
    if (fcforge_verify(b, "2,2,2,2,1", 0, 0, &v) != FC_STATUS_OK) {
        fprintf(stderr, "%s\n", fcforge_last_error());
        fcforge_family_free(b);
        return 1;
    }
    fcforge_verdict_kind(v, &kind);
    fcforge_verdict_to_string(v, &text);
    printf("%s\n", text);
    fcforge_string_free(text);
    fcforge_verdict_free(v);
    fcforge_family_free(b);
    return kind == FC_VERDICT_KIND_FC_VERIFIED ? 0 : 1;
}
