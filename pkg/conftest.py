import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'dla_backend.settings')
django.setup()
