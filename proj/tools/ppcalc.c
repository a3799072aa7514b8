/* Command-line front end: one session per invocation, one command per run.
 * Everything interesting happens behind the C API. */
#include <ppcalc/ppcalc.h>

#include <stdio.h>

int main(int argc, char** argv) {
    ppc_session* session = ppc_session_new();
    if (!session) {
        fputs("error: out of memory\n", stderr);
        return PPC_INTERNAL_ERROR;
    }

    char* report = NULL;
    ppc_status status = ppc_run_command(session, argc - 1,
                                        (const char* const*)(argv + 1), &report);
    if (report) {
        fputs(report, status <= PPC_PROPERTY_FAILED ? stdout : stderr);
        ppc_string_free(report);
    } else {
        fprintf(stderr, "error: %s\n", ppc_last_error());
    }

    ppc_session_free(session);
    return (int)status;
}
