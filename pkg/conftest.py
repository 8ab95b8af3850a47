import numpy
import scipy

from phasegate import get_version_string
from phasegate.testing.testcases import RUN_SLOW_TESTS


def pytest_report_header(config):
    return [
        'Phasegate %s' % get_version_string(),
        'NumPy %s, SciPy %s' % (numpy.__version__, scipy.__version__),
        'Slow tests: %s' % ('enabled' if RUN_SLOW_TESTS else
                            'disabled (set PHASEGATE_RUN_SLOW=1)'),
    ]
