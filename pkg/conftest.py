import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'anygram.settings')
django.setup()
