"""
Setuptools based setup module
"""
from setuptools import setup, find_packages

version = {}
with open("topicflow/_version.py") as f:
    exec(f.read(), version)

setup(
    name='topicflow',
    version=version['__version__'],
    description='topicflow - Extract candidate discussion codes from discussion-board posts.',
    long_description='Topicflow runs latent semantic analysis, keyword-guided LDA and word-embedding K-means '
                     'over small discussion corpora, and selects the number of topics by topic coherence.',

    author='Max-Planck-Institut für Eisenforschung GmbH - Computational Materials Design (CM) Department',
    license='BSD',

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'Topic :: Text Processing :: Linguistic',
        'License :: OSI Approved :: BSD License',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Education',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    keywords='topic modeling',
    packages=find_packages(exclude=["*tests*", "*docs*", "*binder*", "*conda*", "*notebooks*", "*.ci_support*"]),
    package_data={'topicflow': ['data/*.txt']},
    install_requires=[
        'gensim ==4.3.3',
        'matplotlib ==3.8.4',
        'numba ==0.60.0',
        'numpy ==1.26.4',
        'pandas ==1.5.3',
        'regex ==2024.9.11',
        'scikit-learn ==1.5.2',
        'scipy ==1.13.1',
        'seaborn ==0.13.2',
        'traitlets ==5.14.3',
    ],
    entry_points={
        'console_scripts': [
            'topicflow=topicflow.cli.app:main',
        ],
    },
    )
