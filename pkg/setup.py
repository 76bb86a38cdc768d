from setuptools import setup, find_packages

__version__ = '1.0.0'

# Add README as long description
with open("README.md", "r") as fh:
    long_description = fh.read()

# Parse requirements.txt
with open('requirements.txt') as f:
    required = f.read().splitlines()

setup(
    name='ep-holonomy',
    description='Geometric phases and holonomies of non-Hermitian matrix families, around exceptional points',
    long_description=long_description,
    long_description_content_type="text/markdown",
    version=__version__,
    license='MIT',
    packages=find_packages(exclude=['tests']),
    install_requires=required,
    python_requires='>=3.9',
    entry_points={
        'console_scripts': ['ep-holonomy=ep_holonomy.cli:main'],
    },
)
