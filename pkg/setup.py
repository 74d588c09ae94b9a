import re
from setuptools import setup

VERSIONFILE='elimsvm/_version.py'
verstrline = open(VERSIONFILE, "rt").read()
VSRE = r"^__version__ = ['\"]([^'\"]*)['\"]"
mo = re.search(VSRE, verstrline, re.M)
if mo:
    verstr = mo.group(1)
else:
    raise RuntimeError("Unable to find version string in %s." % (VERSIONFILE,))

setup(name='elimsvm',
      version=verstr,
      description='elimsvm: backward feature elimination for kernel support vector machines',
      author='elimsvm developers',
      license='MIT',
      packages=['elimsvm'],
      install_requires=['numpy','scipy','scikit-learn','matplotlib','seaborn'],
      python_requires='>=3.6',
      entry_points={
            'console_scripts': [
                 'elimsvm=elimsvm.__main__:main'
            ]},
      zip_safe=False)
