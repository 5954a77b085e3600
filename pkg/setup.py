from __future__ import absolute_import
from setuptools import setup, find_packages

setup(
    name = 'python-ebrank',
    version = '0.1.0',
    description = 'Empirical-Bayes ranking of citation networks.',
    author = 'Medium',
    author_email = 'labs@thisismedium.com',
    license = 'BSD',
    keywords = 'citation pagerank eigenfactor dirichlet empirical-bayes',

    packages = list(find_packages(exclude=('tests', 'examples'))),
    install_requires = ['numpy>=1.22', 'scipy>=1.7', 'pandas>=1.5', 'simplejson'],
    extras_require = {'test': ['pytest']},
    entry_points = {'console_scripts': ['ebrank = ebrank.cli:main']}
)
