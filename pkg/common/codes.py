EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_IDENTITY_VIOLATION = 3
EXIT_THRESHOLD_FAILURE = 4
EXIT_RESOURCE_LIMIT = 5

MANIFEST_FILE = "manifest.json"
REPORT_FILE = "report.json"
IDENTITY_REPORT_FILE = "identities.json"

SUBSEQUENCE_NOTE = (
    "Left-height convergence is only established along a subsequence; the "
    "checks treat the full sequence as converging, which holds in the "
    "Brownian case because the limit law is unique."
)
