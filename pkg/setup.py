#!/usr/bin/env python3

from setuptools import find_packages, setup

from phasegate import get_package_version


PACKAGE = 'phasegate'


with open('README.rst', 'r') as fp:
    long_description = fp.read()


setup(
    name=PACKAGE,
    version=get_package_version(),
    description=(
        'Krotov optimal control of two-atom controlled phasegates.'
    ),
    long_description=long_description,
    long_description_content_type='text/x-rst',
    packages=find_packages(exclude=['tests']),
    install_requires=[
        'housekeeping~=1.1',
        'numpy>=1.22',
        'PyYAML>=3.12',
        'scipy>=1.9',
        'threadpoolctl>=3.1',
    ],
    entry_points={
        'console_scripts': [
            'phasegate = phasegate.cli.main:main',
        ],
    },
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Topic :: Scientific/Engineering :: Physics',
    ],
)
