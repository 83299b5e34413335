from setuptools import setup

setup(
    name='ordpat',
    version='0.1.0',
    description='Exact order patterns of interval maps, shifts and series',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    author='Sébastien Brisard',
    author_email='',
    packages=['ordpat'],
    scripts=['scripts/order_patterns.py'],
    python_requires='>=3.8',
    install_requires=['numpy>=1.20'],
    extras_require={'test': ['pytest']},
    license='BSD-3',
    classifiers=['Development Status :: 4 - Beta',
                 'Intended Audience :: Developers',
                 'Intended Audience :: Science/Research',
                 'License :: OSI Approved :: BSD License',
                 'Operating System :: OS Independent',
                 'Programming Language :: Python :: 3',
                 'Topic :: Scientific/Engineering :: Mathematics'],
)
