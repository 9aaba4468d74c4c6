String a = first.trim().toUpperCase();
String b = last.trim().toUpperCase();
