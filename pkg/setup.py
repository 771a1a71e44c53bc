from setuptools import setup
import pathlib


here = pathlib.Path(__file__).parent.resolve()
long_description = (here / 'README.md').read_text(encoding='utf-8')


setup(
    name='fracbinom',
    version='0.1.0',
    description='Simulation, moments and parameter estimation for the fractional binomial process.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        'Programming Language :: Python :: 3 :: Only',
    ],
    keywords='fractional processes, birth-death, mittag-leffler, long-range dependence, method of moments',
    packages=["fracbinom"],
    python_requires='>=3.8',
    install_requires=["numpy>=1.20", "scipy>=1.7", "mpmath"],
    extras_require={'test': ["pytest"]},
    entry_points={'console_scripts': ['fracbinom=fracbinom.cli:main']},
)
