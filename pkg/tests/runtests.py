#!/usr/bin/env python3

import sys

import numpy
import pytest

import phasegate


if __name__ == '__main__':
    print('Python %s.%s.%s' % (sys.version_info[:3]))
    print('Phasegate %s' % phasegate.get_version_string())
    print('NumPy %s' % numpy.__version__)

    sys.exit(pytest.main(sys.argv[1:]))
